"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its runtime (run with ``pytest tests/test_acceptance.py
-v -s`` to see them). Tolerances are stated inline; runtime budgets are
asserted too."""

import bisect
import itertools
import json
import math
import shutil
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from refcast.cli import main
from refcast.engine import (
    EmpiricalDistribution,
    adjust_forecast,
    delay_adjustment,
    quantile,
)
from refcast.records import parse_dataset, serialize_dataset
from refcast.sim import (
    derive_trial_seed,
    generate_portfolio,
    load_sim_config,
    select_projects,
)
from refcast.stats import bootstrap_ci, separation_test, shortfall_to_overestimate

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
GOLDEN = Path(__file__).resolve().parent / "data" / "golden_rail_bias_demo.json"


@contextmanager
def criterion(number, description, budget_seconds):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} FAIL: {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {number} PASS ({elapsed:.2f}s): {description}")
    assert elapsed < budget_seconds, f"criterion {number} exceeded {budget_seconds}s"


def cli_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    assert code == 0, f"exit {code} for {argv}"
    return json.loads(out)


def test_criterion_1_delay_rule():
    with criterion(1, "delay cost arithmetic on an 8000M project", 5):
        extra_pct, extra_cost = delay_adjustment(8000.0, 1.0)
        assert 368.0 <= extra_cost <= 372.0
        assert 0.98 <= extra_cost / 365.0 <= 1.05
        assert extra_pct == pytest.approx(4.64)


def test_criterion_2_uplift_application():
    with criterion(2, "uplift amounts on a 4000M estimate", 5):
        forty = adjust_forecast(4000.0, 40.0)
        sixty_eight = adjust_forecast(4000.0, 68.0)
        assert forty.uplift_amount == 1600.0
        assert abs(sixty_eight.uplift_amount - 2700.0) <= 20.0
        assert sixty_eight.uplift_amount == 2720.0


def test_criterion_3_conversion_identity():
    with criterion(3, "shortfall-to-overestimate conversion of -51.4", 5):
        assert 105.3 <= shortfall_to_overestimate(-51.4) <= 106.3


def test_criterion_4_pipeline_reproduction(capsys, tmp_path):
    with criterion(4, "generated dataset reproduces the published class stats", 5):
        csv_path = tmp_path / "sample_dataset.csv"
        assert main(["make-sample-data", "--out", str(csv_path)]) == 0
        capsys.readouterr()

        expected_cost = {"rail": (58, 44.7, 38.4), "bridge_tunnel": (33, 33.8, 62.4),
                         "road": (167, 20.4, 29.9)}
        for ptype, (n, mean, sd) in expected_cost.items():
            payload = cli_json(capsys, "stats", str(csv_path), "--type", ptype,
                               "--measure", "cost")
            assert payload["n"] == n
            assert abs(payload["mean"] - mean) <= 0.05
            assert abs(payload["sd"] - sd) <= 0.05

        expected_traffic = {"rail": (25, -51.4, 28.1), "road": (183, 9.5, 44.3)}
        for ptype, (n, mean, sd) in expected_traffic.items():
            payload = cli_json(capsys, "stats", str(csv_path), "--type", ptype,
                               "--measure", "traffic")
            assert payload["n"] == n
            assert abs(payload["mean"] - mean) <= 0.05
            assert abs(payload["sd"] - sd) <= 0.05

        pooled = cli_json(capsys, "stats", str(csv_path), "--measure", "cost")
        assert pooled["n"] == 258
        assert 0.88 <= pooled["share_overrun"] <= 0.92

        rail_traffic = cli_json(capsys, "stats", str(csv_path), "--type", "rail",
                                "--measure", "traffic")
        assert abs(rail_traffic["share_outside_band"] - 0.84) <= 1 / 25
        road_traffic = cli_json(capsys, "stats", str(csv_path), "--type", "road",
                                "--measure", "traffic")
        assert abs(road_traffic["share_outside_band"] - 0.50) <= 0.03


def test_criterion_5_uplift_anchors_and_monotone_curves(capsys, bundled_csv_path):
    with criterion(5, "UK-rail uplift anchors exact; curves non-increasing", 1):
        at_half = cli_json(capsys, "uplift", str(bundled_csv_path), "--type", "rail",
                           "--region", "UK", "--risk", "0.5", "--base", "4000")
        at_tenth = cli_json(capsys, "uplift", str(bundled_csv_path), "--type", "rail",
                            "--region", "UK", "--risk", "0.1", "--base", "4000")
        assert at_half["uplift_pct"] == 40.0
        assert at_tenth["uplift_pct"] == 68.0

        bundled_classes = [
            ("cost", ["--type", "rail"]),
            ("cost", ["--type", "bridge_tunnel"]),
            ("cost", ["--type", "road"]),
            ("traffic", ["--type", "rail"]),
            ("traffic", ["--type", "road"]),
            ("cost", ["--type", "rail", "--region", "UK"]),
        ]
        for measure, flags in bundled_classes:
            code = main(["curve", str(bundled_csv_path), "--measure", measure,
                         "--grid", "0.01:0.99:99", *flags])
            assert code == 0
            rows = capsys.readouterr().out.strip().splitlines()[1:]
            assert len(rows) == 99
            ups = [float(row.split(",")[1]) for row in rows]
            assert all(a >= b for a, b in zip(ups, ups[1:])), flags


def test_criterion_6_quantile_oracle_equivalence():
    with criterion(6, "quantile matches the independent oracle to 1e-9", 10):
        rng = np.random.Generator(np.random.PCG64(4242))
        for _ in range(1000):
            n = int(rng.integers(1, 51))
            sample = rng.normal(rng.uniform(-50, 50), rng.uniform(0.1, 60), n)
            dist = EmpiricalDistribution(values=tuple(sorted(float(v) for v in sample)))
            for q in rng.random(20):
                mine = quantile(dist, float(q))
                oracle = float(np.quantile(sample, float(q)))
                assert math.isclose(mine, oracle, rel_tol=1e-9, abs_tol=1e-9)


def _oracle_split_pvalues(values, n_a):
    """Independent exact two-sided permutation distribution.

    U statistics come from direct pairwise comparisons (doubled, so ties
    stay integral) rather than ranks; the deviation distribution is
    enumerated once and reused for every split.
    """
    n = len(values)
    cmp = [[2 * (x > y) + (x == y) for y in values] for x in values]
    deviations = []
    center = n_a * (n - n_a)  # doubled U has null mean n_a * n_b
    for combo in itertools.combinations(range(n), n_a):
        chosen = set(combo)
        d2u = sum(cmp[i][j] for i in combo for j in range(n) if j not in chosen)
        deviations.append(abs(d2u - center))
    deviations.sort()
    total = len(deviations)

    def p_for(combo):
        chosen = set(combo)
        d2u = sum(cmp[i][j] for i in combo for j in range(n) if j not in chosen)
        obs = abs(d2u - center)
        return (total - bisect.bisect_left(deviations, obs)) / total

    return p_for


def test_criterion_7_separation_test_oracle():
    with criterion(7, "exact permutation p-values on all splits up to n=10", 30):
        assert separation_test([1, 2, 3], [10, 11, 12]).p_value == 0.1

        rng = np.random.Generator(np.random.PCG64(99))
        for n in range(4, 11):
            values = [float(v) for v in rng.integers(0, max(3, n - 2), n)]  # ties
            for n_a in range(2, n - 1):
                oracle = _oracle_split_pvalues(values, n_a)
                for combo in itertools.combinations(range(n), n_a):
                    chosen = set(combo)
                    a = [values[i] for i in combo]
                    b = [values[i] for i in range(n) if i not in chosen]
                    assert separation_test(a, b).p_value == oracle(combo), (
                        n, n_a, combo, values)


def test_criterion_8_simulator_properties(capsys, tmp_path, bundled_csv_path):
    with criterion(8, "zero-bias exactness, oracle-optimal regret, determinism", 60):
        for name in ("zero_bias.cfg", "rail_bias_demo.cfg"):
            shutil.copy(CONFIGS / name, tmp_path / name)
        shutil.copy(bundled_csv_path, tmp_path / "sample_dataset.csv")

        zero = cli_json(capsys, "simulate", str(tmp_path / "zero_bias.cfg"))
        assert zero["mean_regret"] == 0.0
        assert zero["mean_overlap"] == 1.0

        demo_cfg = tmp_path / "rail_bias_demo.cfg"
        assert main(["simulate", str(demo_cfg)]) == 0
        first = capsys.readouterr().out
        assert main(["simulate", str(demo_cfg)]) == 0
        second = capsys.readouterr().out
        assert first == second, "repeated runs must be byte-identical"
        payload = json.loads(first)
        assert payload["mean_regret"] > 0.0
        assert payload == json.loads(GOLDEN.read_text(encoding="utf-8"))

        config = load_sim_config(demo_cfg)
        assert config.n_candidates == 12
        assert config.selection_rule == "exhaustive"
        assert config.trials == 1000
        for trial in range(config.trials):
            candidates = generate_portfolio(
                config, derive_trial_seed(config.master_seed, trial))
            by_id = {c.id: c for c in candidates}
            biased = select_projects(candidates, config.budget, "estimated",
                                     "exhaustive")
            oracle = select_projects(candidates, config.budget, "true", "exhaustive")

            def realized(sel):
                return sum(by_id[i].true_benefit - by_id[i].true_cost
                           for i in sel.ids)

            oracle_net = realized(oracle)
            biased_net = realized(biased)
            regret = (1.0 - biased_net / oracle_net) if oracle_net > 0 else (
                0.0 if biased_net == oracle_net else 1.0)
            assert regret >= 0.0, f"trial {trial} has negative regret"


def test_criterion_9_round_trips(bundled_csv_path):
    with criterion(9, "CSV, uplift and bootstrap round trips", 5):
        text = bundled_csv_path.read_text(encoding="utf-8")
        once = parse_dataset(text)
        again = parse_dataset(serialize_dataset(once))
        assert once.records == again.records
        assert serialize_dataset(once) == serialize_dataset(again)

        rng = np.random.Generator(np.random.PCG64(55))
        for _ in range(500):
            base = float(rng.uniform(1, 1e7))
            uplift = float(rng.uniform(-95, 300))
            adjusted = adjust_forecast(base, uplift).adjusted_estimate
            assert math.isclose(adjusted / (1 + uplift / 100.0), base, rel_tol=1e-9)

        sample = list(rng.normal(30, 20, 14))
        first = bootstrap_ci(sample, "mean", level=0.9, reps=600, seed=77)
        second = bootstrap_ci(sample, "mean", level=0.9, reps=600, seed=77)
        assert first == second
        quant = bootstrap_ci(sample, "quantile", q=0.75, level=0.9, reps=600, seed=77)
        assert quant == bootstrap_ci(sample, "quantile", q=0.75, level=0.9,
                                     reps=600, seed=77)

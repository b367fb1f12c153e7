"""Monte Carlo simulator of project selection under forecast bias.

Candidates have true costs and benefits; their *estimates* are distorted so
that realized outcomes reproduce sampled inaccuracies exactly (an estimate
of cost c with sampled overrun o satisfies actual = estimate * (1 + o/100),
hence estimate = true / (1 + o/100)). Selection by estimated figures is then
compared against selection by true figures under the same rule, trial by
trial, to quantify how bias lets the wrong projects win: chosen sets
diverge, realized net benefit drops, and the ranking of projects decouples
from their true economics.

Everything is deterministic given the config: trial seeds derive from the
master seed by a stable hash, and aggregation is in trial order.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .engine import ClassCriteria, ReferenceClass, build_reference_class
from .records import load_dataset

SELECTION_RULES = ("greedy_bcr", "exhaustive")
EXHAUSTIVE_MAX_CANDIDATES = 20

SEED_DERIVATION = "sha256(master_seed:trial_index)->pcg64"


@dataclass(frozen=True)
class BiasSource:
    """Distribution the per-candidate inaccuracies are drawn from.

    ``empirical`` resamples a reference-class sample with replacement;
    ``normal`` and ``fixed`` are parametric. Draws at or below -100 percent
    are rejected and redrawn (an actual outcome cannot be negative).
    """

    kind: str
    sample: tuple[float, ...] = ()
    mean: float = 0.0
    sd: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("empirical", "normal", "fixed"):
            raise ValueError(f"unknown bias source kind {self.kind!r}")
        if self.kind == "empirical":
            if not self.sample:
                raise ValueError("empirical bias source needs a non-empty sample")
            if min(self.sample) <= -100.0:
                raise ValueError("empirical bias sample has values <= -100")
        if self.kind == "normal" and self.sd < 0:
            raise ValueError(f"sd must be >= 0, got {self.sd}")
        if self.kind == "fixed" and self.mean <= -100.0:
            raise ValueError(f"fixed bias must be > -100, got {self.mean}")

    @classmethod
    def from_reference_class(cls, ref_class: ReferenceClass) -> "BiasSource":
        return cls(kind="empirical", sample=ref_class.sample, label=ref_class.name)

    @classmethod
    def normal(cls, mean: float, sd: float) -> "BiasSource":
        return cls(kind="normal", mean=mean, sd=sd, label=f"normal({mean},{sd})")

    @classmethod
    def fixed(cls, value: float) -> "BiasSource":
        return cls(kind="fixed", mean=value, label=f"fixed({value})")


@dataclass(frozen=True)
class SimConfig:
    n_candidates: int
    budget: float
    cost_bias: BiasSource
    benefit_bias: BiasSource
    true_cost_range: tuple[float, float]
    true_benefit_range: tuple[float, float]
    trials: int
    master_seed: int
    selection_rule: str = "greedy_bcr"
    bias_correlation: float = 0.0

    def validate(self) -> None:
        problems = []
        if self.n_candidates < 1:
            problems.append("n_candidates must be >= 1")
        if self.budget < 0:
            problems.append("budget must be >= 0")
        if self.trials < 1:
            problems.append("trials must be >= 1")
        if self.selection_rule not in SELECTION_RULES:
            problems.append(f"selection_rule must be one of {SELECTION_RULES}")
        if (
            self.selection_rule == "exhaustive"
            and self.n_candidates > EXHAUSTIVE_MAX_CANDIDATES
        ):
            problems.append(
                f"exhaustive rule needs n_candidates <= {EXHAUSTIVE_MAX_CANDIDATES}"
            )
        for label, (lo, hi) in (
            ("true_cost_range", self.true_cost_range),
            ("true_benefit_range", self.true_benefit_range),
        ):
            if not 0 < lo <= hi:
                problems.append(f"{label} must satisfy 0 < low <= high")
        if not -1.0 <= self.bias_correlation <= 1.0:
            problems.append("bias_correlation must be in [-1, 1]")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True)
class Candidate:
    id: int
    true_cost: float
    true_benefit: float
    est_cost: float
    est_benefit: float
    sampled_cost_overrun: float
    sampled_benefit_inaccuracy: float


@dataclass(frozen=True)
class Selection:
    """Chosen project ids (ascending) with totals in the chosen figures."""

    ids: tuple[int, ...]
    total_cost: float
    total_benefit: float
    total_net: float


@dataclass(frozen=True)
class SimResult:
    mean_regret: float
    mean_overlap: float
    rank_correlation: float
    trials: int
    seed_derivation: str = SEED_DERIVATION

    def to_json_dict(self) -> dict:
        return {
            "mean_regret": self.mean_regret,
            "mean_overlap": self.mean_overlap,
            "rank_correlation": self.rank_correlation,
            "trials": self.trials,
            "seed_derivation": self.seed_derivation,
        }


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Stable 64-bit trial seed (see :data:`SEED_DERIVATION`)."""
    digest = hashlib.sha256(f"{master_seed}:{trial_index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _phi(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def _map_uniform(source: BiasSource, u: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Map correlated normal scores / uniforms onto a bias source."""
    if source.kind == "empirical":
        sample = np.asarray(source.sample, dtype=np.float64)
        pos = np.minimum((u * len(sample)).astype(np.int64), len(sample) - 1)
        return sample[pos]
    if source.kind == "normal":
        return source.mean + source.sd * z
    return np.full(len(u), source.mean)


def _draw_independent(rng: np.random.Generator, source: BiasSource, n: int) -> np.ndarray:
    if source.kind == "empirical":
        sample = np.asarray(source.sample, dtype=np.float64)
        return sample[rng.integers(0, len(sample), size=n)]
    if source.kind == "fixed":
        return np.full(n, source.mean)
    draws = rng.normal(source.mean, source.sd, size=n)
    while True:
        bad = draws <= -100.0
        if not bad.any():
            return draws
        draws[bad] = rng.normal(source.mean, source.sd, size=int(bad.sum()))


def _draw_bias_pair(
    rng: np.random.Generator, config: SimConfig, n: int
) -> tuple[np.ndarray, np.ndarray]:
    corr = config.bias_correlation
    if corr == 0.0:
        cost = _draw_independent(rng, config.cost_bias, n)
        benefit = _draw_independent(rng, config.benefit_bias, n)
        return cost, benefit
    # Gaussian copula; empirical marginals stay resampling-with-replacement
    # because Phi(z) is uniform
    cost = np.empty(n)
    benefit = np.empty(n)
    pending = np.arange(n)
    while len(pending):
        z1 = rng.standard_normal(len(pending))
        z2 = corr * z1 + math.sqrt(1.0 - corr * corr) * rng.standard_normal(len(pending))
        u1 = np.array([_phi(z) for z in z1])
        u2 = np.array([_phi(z) for z in z2])
        cost[pending] = _map_uniform(config.cost_bias, u1, z1)
        benefit[pending] = _map_uniform(config.benefit_bias, u2, z2)
        bad = (cost[pending] <= -100.0) | (benefit[pending] <= -100.0)
        pending = pending[bad]  # redraw the whole pair jointly
    return cost, benefit


def generate_portfolio(config: SimConfig, trial_seed: int) -> list[Candidate]:
    """Draw one candidate portfolio; identical (config, seed) gives an
    identical sequence."""
    config.validate()
    rng = np.random.Generator(np.random.PCG64(trial_seed))
    n = config.n_candidates
    true_costs = rng.uniform(*config.true_cost_range, size=n)
    true_benefits = rng.uniform(*config.true_benefit_range, size=n)
    overruns, inaccuracies = _draw_bias_pair(rng, config, n)
    return [
        Candidate(
            id=i,
            true_cost=float(true_costs[i]),
            true_benefit=float(true_benefits[i]),
            est_cost=float(true_costs[i] / (1.0 + overruns[i] / 100.0)),
            est_benefit=float(true_benefits[i] / (1.0 + inaccuracies[i] / 100.0)),
            sampled_cost_overrun=float(overruns[i]),
            sampled_benefit_inaccuracy=float(inaccuracies[i]),
        )
        for i in range(n)
    ]


def _chosen_figures(candidate: Candidate, by: str) -> tuple[float, float]:
    if by == "estimated":
        return candidate.est_cost, candidate.est_benefit
    return candidate.true_cost, candidate.true_benefit


def select_projects(
    candidates, budget: float, by: str = "estimated", rule: str = "greedy_bcr"
) -> Selection:
    """Select a portfolio under a budget, by estimated or true figures.

    greedy_bcr ranks by benefit-cost ratio (ties by ascending id) and admits
    whatever still fits; projects whose chosen figures show negative net
    benefit are never admitted (approval needs a ratio of at least one).
    exhaustive maximizes total net benefit over all subsets, ties going to
    the lexicographically smallest id set.
    """
    candidates = sorted(candidates, key=lambda c: c.id)
    if not candidates:
        raise ValueError("no candidates")
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if by not in ("estimated", "true"):
        raise ValueError(f"by must be 'estimated' or 'true', got {by!r}")
    if rule not in SELECTION_RULES:
        raise ValueError(f"rule must be one of {SELECTION_RULES}, got {rule!r}")

    if rule == "exhaustive":
        if len(candidates) > EXHAUSTIVE_MAX_CANDIDATES:
            raise ValueError(
                f"exhaustive rule supports at most {EXHAUSTIVE_MAX_CANDIDATES} candidates"
            )
        figures = [_chosen_figures(c, by) for c in candidates]
        mask, total_cost, total_benefit = _kernels.exhaustive_best_subset(
            [f[0] for f in figures], [f[1] for f in figures], budget
        )
        ids = tuple(candidates[i].id for i in range(len(candidates)) if mask >> i & 1)
        return Selection(ids, total_cost, total_benefit, total_benefit - total_cost)

    eligible = []
    for c in candidates:
        cost, benefit = _chosen_figures(c, by)
        if benefit >= cost:
            eligible.append((benefit / cost, c.id, cost, benefit))
    eligible.sort(key=lambda item: (-item[0], item[1]))
    ids = []
    total_cost = 0.0
    total_benefit = 0.0
    for _bcr, cid, cost, benefit in eligible:
        if total_cost + cost <= budget:
            ids.append(cid)
            total_cost += cost
            total_benefit += benefit
    ids.sort()
    return Selection(tuple(ids), total_cost, total_benefit, total_benefit - total_cost)


def brute_force_optimal(candidates, budget: float) -> Selection:
    """Oracle selection: enumerate every subset by true figures.

    Kept independent of the exhaustive kernel (plain itertools enumeration)
    so the two act as cross-checks.
    """
    candidates = sorted(candidates, key=lambda c: c.id)
    if len(candidates) > EXHAUSTIVE_MAX_CANDIDATES:
        raise ValueError(
            f"brute force supports at most {EXHAUSTIVE_MAX_CANDIDATES} candidates"
        )
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    best = None
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            total_cost = 0.0
            total_benefit = 0.0
            for c in combo:  # ascending id order, same fold as the kernel
                total_cost += c.true_cost
                total_benefit += c.true_benefit
            if total_cost > budget:
                continue
            net = total_benefit - total_cost
            ids = tuple(c.id for c in combo)
            if best is None or net > best[0] or (net == best[0] and ids < best[1]):
                best = (net, ids, total_cost, total_benefit)
    return Selection(best[1], best[2], best[3], best[0])


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def _spearman(xs: list[float], ys: list[float]) -> float:
    """Spearman rank correlation with midranks.

    Identical rankings give exactly 1.0; a constant vector (undefined
    correlation) gives 0.0 unless both rankings are identical.
    """
    rx = _midranks(xs)
    ry = _midranks(ys)
    if rx == ry:
        return 1.0
    n = len(rx)
    mean = (n + 1) / 2.0
    vx = math.fsum((r - mean) ** 2 for r in rx)
    vy = math.fsum((r - mean) ** 2 for r in ry)
    if vx == 0.0 or vy == 0.0:
        return 0.0
    cov = math.fsum((a - mean) * (b - mean) for a, b in zip(rx, ry))
    return cov / math.sqrt(vx * vy)


def _realized_net(selection: Selection, by_id: dict[int, Candidate]) -> float:
    total_cost = 0.0
    total_benefit = 0.0
    for cid in selection.ids:
        total_cost += by_id[cid].true_cost
        total_benefit += by_id[cid].true_benefit
    return total_benefit - total_cost


def run_simulation(config: SimConfig) -> SimResult:
    """Run all trials and aggregate selection-distortion metrics.

    Per trial: the biased chooser selects on estimates, the oracle selects
    on true figures with the same rule, and both selections are scored at
    true figures. Regret is 1 - biased/oracle realized net benefit (0 when
    both realize nothing, full regret 1 when the oracle realizes nothing
    but the biased choice loses money). Overlap is the fraction of
    biased-selected projects the oracle also selected (1 when both
    selections are empty, 0 when only the biased one is). Rank correlation
    compares estimated and true benefit-cost ratios over all candidates.

    Note on regret sign: the biased chooser fills the budget at estimated
    cost, so with underestimated costs its portfolio may overspend in true
    terms and, when the budget binds, occasionally realize more net benefit
    than the budget-constrained oracle (negative regret in that trial).
    Configure the budget above the candidate pool's worst-case true cost to
    make the oracle's optimum unconstrained, which forces per-trial regret
    nonnegative (the shipped demo config does this).
    """
    config.validate()
    regrets = []
    overlaps = []
    correlations = []
    for trial in range(config.trials):
        candidates = generate_portfolio(config, derive_trial_seed(config.master_seed, trial))
        by_id = {c.id: c for c in candidates}
        biased = select_projects(candidates, config.budget, "estimated", config.selection_rule)
        oracle = select_projects(candidates, config.budget, "true", config.selection_rule)

        oracle_net = _realized_net(oracle, by_id)
        biased_net = _realized_net(biased, by_id)
        if oracle_net > 0.0:
            regrets.append(1.0 - biased_net / oracle_net)
        elif biased_net == oracle_net:
            regrets.append(0.0)
        else:
            regrets.append(1.0)

        if biased.ids:
            common = len(set(biased.ids) & set(oracle.ids))
            overlaps.append(common / len(biased.ids))
        else:
            overlaps.append(1.0 if not oracle.ids else 0.0)

        correlations.append(
            _spearman(
                [c.est_benefit / c.est_cost for c in candidates],
                [c.true_benefit / c.true_cost for c in candidates],
            )
        )
    return SimResult(
        mean_regret=math.fsum(regrets) / config.trials,
        mean_overlap=math.fsum(overlaps) / config.trials,
        rank_correlation=math.fsum(correlations) / config.trials,
        trials=config.trials,
    )


# --- flat key=value config files -------------------------------------------

_BASE_KEYS = {
    "n_candidates", "budget", "trials", "master_seed", "selection_rule",
    "bias_correlation", "true_cost_min", "true_cost_max",
    "true_benefit_min", "true_benefit_max",
}
_BIAS_KEYS = {"", "_mean", "_sd", "_dataset", "_project_type", "_region"}


def _parse_bias(prefix: str, kv: dict[str, str], base_dir: Path) -> BiasSource:
    kind = kv.get(prefix)
    if kind is None:
        raise ValueError(f"missing key {prefix!r}")
    if kind == "fixed":
        return BiasSource.fixed(float(kv[f"{prefix}_mean"]))
    if kind == "normal":
        return BiasSource.normal(float(kv[f"{prefix}_mean"]), float(kv[f"{prefix}_sd"]))
    if kind == "empirical":
        path = Path(kv[f"{prefix}_dataset"])
        if not path.is_absolute():
            path = base_dir / path
        dataset = load_dataset(path)
        regions = kv.get(f"{prefix}_region")
        criteria = ClassCriteria(
            measure="cost_inaccuracy" if prefix == "cost_bias" else "traffic_inaccuracy",
            project_type=kv.get(f"{prefix}_project_type"),
            regions=frozenset(regions.split("|")) if regions else None,
        )
        return BiasSource.from_reference_class(build_reference_class(dataset, criteria))
    raise ValueError(f"{prefix}: unknown bias kind {kind!r}")


def parse_sim_config(text: str, base_dir: str | Path = ".") -> SimConfig:
    """Parse a flat key = value config file (# starts a comment).

    Relative dataset paths resolve against ``base_dir``, normally the
    directory containing the config file. See the README for the key list.
    """
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in kv:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        kv[key] = value

    allowed = set(_BASE_KEYS)
    for prefix in ("cost_bias", "benefit_bias"):
        allowed.update(prefix + suffix for suffix in _BIAS_KEYS)
    unknown = sorted(set(kv) - allowed)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")

    try:
        base = Path(base_dir)
        config = SimConfig(
            n_candidates=int(kv["n_candidates"]),
            budget=float(kv["budget"]),
            cost_bias=_parse_bias("cost_bias", kv, base),
            benefit_bias=_parse_bias("benefit_bias", kv, base),
            true_cost_range=(float(kv["true_cost_min"]), float(kv["true_cost_max"])),
            true_benefit_range=(
                float(kv["true_benefit_min"]),
                float(kv["true_benefit_max"]),
            ),
            trials=int(kv["trials"]),
            master_seed=int(kv["master_seed"]),
            selection_rule=kv.get("selection_rule", "greedy_bcr"),
            bias_correlation=float(kv.get("bias_correlation", "0.0")),
        )
    except KeyError as exc:
        raise ValueError(f"missing config key: {exc.args[0]}") from None
    config.validate()
    return config


def load_sim_config(path: str | Path) -> SimConfig:
    path = Path(path)
    return parse_sim_config(path.read_text(encoding="utf-8"), base_dir=path.parent)

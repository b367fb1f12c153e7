"""Command-line surface.

Subcommands: ``stats``, ``uplift``, ``curve``, ``simulate``,
``make-sample-data``. Machine-readable payloads (JSON or CSV or SVG) go to
stdout, diagnostics to stderr, never mixed. Exit codes: 0 success, 1 bad
input data (missing file, invalid dataset, empty class), 2 usage error
(bad flags or parameter values).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import charts, sampledata
from .engine import (
    ClassCriteria,
    build_reference_class,
    empirical_distribution,
    reference_forecast,
    uplift_curve,
)
from .errors import DataError
from .records import load_dataset
from .sim import load_sim_config, run_simulation
from .stats import share_outside_band, share_overrun, summarize

_MEASURES = {"cost": "cost_inaccuracy", "traffic": "traffic_inaccuracy"}


def _add_class_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("dataset", help="dataset CSV path")
    parser.add_argument("--type", dest="project_type", default=None,
                        choices=["rail", "road", "bridge_tunnel", "other"],
                        help="filter by project type")
    parser.add_argument("--measure", default="cost", choices=["cost", "traffic"],
                        help="inaccuracy measure (default cost)")
    parser.add_argument("--region", action="append", default=None,
                        help="region tag filter; repeatable")
    parser.add_argument("--year-from", type=int, default=None,
                        help="earliest decision year")
    parser.add_argument("--year-to", type=int, default=None,
                        help="latest decision year")
    parser.add_argument("--class-name", default=None,
                        help="name for the class in reports")


def _criteria(args) -> ClassCriteria:
    return ClassCriteria(
        measure=_MEASURES[args.measure],
        project_type=args.project_type,
        regions=frozenset(args.region) if args.region else None,
        year_range=(args.year_from, args.year_to),
    )


def _load_class(args):
    dataset = load_dataset(args.dataset)
    return build_reference_class(dataset, _criteria(args), name=args.class_name)


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _cmd_stats(args) -> int:
    ref = _load_class(args)
    summary = summarize(ref.sample)
    payload = {
        "class_name": ref.name,
        "n": summary.n,
        "mean": summary.mean,
        "sd": summary.sd,
        "share_overrun": share_overrun(ref.sample),
        "band_pct": args.band,
        "share_outside_band": share_outside_band(ref.sample, args.band),
    }
    _emit(json.dumps(payload))
    return 0


def _cmd_uplift(args) -> int:
    ref = _load_class(args)
    report = reference_forecast(
        base_estimate=args.base,
        ref_class=ref,
        acceptable_risk=args.risk,
        delay_years=args.delay_years,
        clamp_negative=args.clamp,
    )
    _emit(json.dumps(report.to_json_dict()))
    return 0


def _parse_grid(spec: str) -> list[float]:
    """Grid spec: comma list ("0.1,0.5") or linspace ("0.01:0.99:99")."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad grid spec {spec!r}, want start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 2 or not start < stop:
            raise ValueError(f"bad grid spec {spec!r}")
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    return [float(tok) for tok in spec.split(",") if tok.strip()]


def _cmd_curve(args) -> int:
    ref = _load_class(args)
    if args.histogram:
        by_region: dict[str, list[float]] = {}
        dataset = load_dataset(args.dataset)
        by_id = {r.id: r for r in dataset.records}
        for rid, value in zip(ref.member_ids, ref.sample):
            by_region.setdefault(by_id[rid].region, []).append(value)
        if args.format == "svg":
            _emit(charts.histogram_svg(by_region, bin_width=args.bins))
        else:
            _emit(charts.histogram_csv(by_region, bin_width=args.bins))
        return 0
    curve = uplift_curve(empirical_distribution(ref), _parse_grid(args.grid))
    if args.format == "svg":
        _emit(charts.curve_svg(curve.points))
    else:
        _emit(curve.to_csv())
    return 0


def _cmd_simulate(args) -> int:
    path = Path(args.config)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    result = run_simulation(load_sim_config(path))
    _emit(json.dumps(result.to_json_dict()))
    return 0


def _cmd_make_sample_data(args) -> int:
    csv_text = sampledata.sample_dataset_csv(seed=args.seed)
    Path(args.out).write_text(csv_text, encoding="utf-8")
    print(f"wrote {args.out} (seed {args.seed})", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refcast",
        description="Reference class forecasting: inaccuracy statistics, "
        "uplift curves, and selection-bias simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="class summary statistics as JSON")
    _add_class_flags(p)
    p.add_argument("--band", type=float, default=20.0,
                   help="band (pp) for the outside-band share (default 20)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("uplift", help="forecast report for one risk level as JSON")
    _add_class_flags(p)
    p.add_argument("--risk", type=float, required=True,
                   help="acceptable risk of overrun, in (0, 1]")
    p.add_argument("--base", type=float, required=True, help="base estimate")
    p.add_argument("--delay-years", type=float, default=0.0,
                   help="years of delay to cost in (default 0)")
    p.add_argument("--clamp", action="store_true",
                   help="clamp negative uplifts to zero")
    p.set_defaults(func=_cmd_uplift)

    p = sub.add_parser("curve", help="uplift curve (or histogram) as CSV or SVG")
    _add_class_flags(p)
    p.add_argument("--grid", default="0.05:0.95:19",
                   help='risk grid: "0.1,0.5" or "start:stop:count"')
    p.add_argument("--format", default="csv", choices=["csv", "svg"])
    p.add_argument("--histogram", action="store_true",
                   help="emit the class inaccuracy histogram instead")
    p.add_argument("--bins", type=float, default=10.0,
                   help="histogram bin width in pp (default 10)")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("simulate", help="run the selection simulator from a config file")
    p.add_argument("config", help="flat key=value config file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("make-sample-data",
                       help="write the bundled synthetic dataset")
    p.add_argument("--seed", type=int, default=sampledata.DEFAULT_SEED)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_make_sample_data)

    return parser


def _warn_to_stderr(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            # surface package warnings as stderr diagnostics, never payload
            warnings.simplefilter("always")
            warnings.showwarning = _warn_to_stderr
            return args.func(args)
    except (DataError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

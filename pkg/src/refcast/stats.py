"""Statistics over inaccuracy samples.

Summary moments, band-share metrics, the shortfall/overestimate conversion,
a two-sample separation test, and percentile-bootstrap confidence intervals.
Samples are plain sequences of percent values (one per project).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

# combined sample size up to which the separation test enumerates every
# group assignment (C(12, 6) = 924 at the threshold)
EXACT_TEST_LIMIT = 12

# exact bootstrap enumeration cap: all n**n ordered resamples are evaluated
# when that count fits under both the requested reps and this bound
EXACT_BOOTSTRAP_LIMIT = 1 << 20


@dataclass(frozen=True)
class SummaryStats:
    """Sample size, mean, and sample standard deviation (n - 1 denominator).

    ``sd`` is None for a single observation, where it is undefined.
    """

    n: int
    mean: float
    sd: float | None


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    level: float


def _as_floats(sample) -> list[float]:
    values = [float(x) for x in sample]
    if not values:
        raise ValueError("empty sample")
    return values


def summarize(sample) -> SummaryStats:
    """Summary statistics of a non-empty sample.

    Uses exactly rounded summation, so the result is invariant under
    permutation of the input, bit for bit.
    """
    values = _as_floats(sample)
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return SummaryStats(n=n, mean=mean, sd=None)
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))
    return SummaryStats(n=n, mean=mean, sd=sd)


def share_overrun(sample) -> float:
    """Fraction of values strictly greater than zero."""
    values = _as_floats(sample)
    return sum(1 for v in values if v > 0.0) / len(values)


def share_outside_band(sample, band: float) -> float:
    """Fraction of values with absolute value strictly greater than ``band``."""
    if not band > 0:
        raise ValueError(f"band must be > 0, got {band}")
    values = _as_floats(sample)
    return sum(1 for v in values if abs(v) > band) / len(values)


def shortfall_to_overestimate(inaccuracy: float) -> float:
    """Convert an inaccuracy into the percent by which the estimate exceeds
    the actual.

    An inaccuracy of -50 (actual half the estimate) is an overestimate of
    100; the conversion is o = 100 * (-i) / (100 + i).
    """
    if inaccuracy <= -100.0:
        raise ValueError(f"inaccuracy must be > -100, got {inaccuracy}")
    return 100.0 * (-inaccuracy) / (100.0 + inaccuracy)


def overestimate_to_shortfall(overestimate: float) -> float:
    """Inverse of :func:`shortfall_to_overestimate`."""
    if overestimate <= -100.0:
        raise ValueError(f"overestimate must be > -100, got {overestimate}")
    return -100.0 * overestimate / (100.0 + overestimate)


def _doubled_midranks(values: list[float]) -> list[int]:
    """Doubled midranks of ``values`` (doubling keeps tied ranks integral)."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    dmid = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            dmid[order[k]] = i + j + 2  # 2 * (average 1-based rank)
        i = j + 1
    return dmid


def _mwu_statistic(a: list[float], b: list[float]) -> tuple[float, list[int]]:
    """Mann-Whitney U of the first sample (ties count one half) plus the
    combined doubled midranks."""
    combined = a + b
    dmid = _doubled_midranks(combined)
    n_a = len(a)
    d2u = sum(dmid[:n_a]) - n_a * (n_a + 1)  # = 2 * U_a, integral
    return d2u / 2.0, dmid


def _exact_p(a: list[float], b: list[float]) -> tuple[float, float]:
    u_a, dmid = _mwu_statistic(a, b)
    n_a, n_b = len(a), len(b)
    obs_dev = abs(int(round(2 * u_a)) - n_a * n_b)
    count = _kernels.mwu_extreme_count(dmid, n_a, obs_dev)
    total = math.comb(n_a + n_b, n_a)
    return u_a, count / total


def _normal_p(a: list[float], b: list[float]) -> tuple[float, float]:
    u_a, dmid = _mwu_statistic(a, b)
    n_a, n_b = len(a), len(b)
    n = n_a + n_b
    tie_term = 0.0
    for d in set(dmid):
        t = dmid.count(d)
        tie_term += t**3 - t
    var = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return u_a, 1.0  # all values identical
    # continuity-corrected two-sided normal approximation
    z = max(abs(u_a - n_a * n_b / 2.0) - 0.5, 0.0) / math.sqrt(var)
    return u_a, min(1.0, math.erfc(z / math.sqrt(2.0)))


def separation_test(a, b) -> TestResult:
    """Two-sided Mann-Whitney U test that two samples share a distribution.

    Small combined samples (n <= 12) get an exact permutation p-value by
    enumerating all group assignments; larger ones use the normal
    approximation with tie correction and continuity correction. Symmetric
    in its arguments.
    """
    a = _as_floats(a)
    b = _as_floats(b)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("separation test needs at least 2 values per sample")
    if len(a) + len(b) <= EXACT_TEST_LIMIT:
        u, p = _exact_p(a, b)
        method = "mann-whitney-u/exact-permutation"
    else:
        u, p = _normal_p(a, b)
        method = "mann-whitney-u/normal-approximation"
    return TestResult(statistic=u, p_value=p, method=method)


def bootstrap_ci(
    sample,
    statistic: str = "mean",
    *,
    q: float | None = None,
    level: float = 0.95,
    reps: int = 2000,
    seed: int = 0,
) -> Interval:
    """Percentile-bootstrap confidence interval for a sample statistic.

    ``statistic`` is ``"mean"`` or ``"quantile"`` (the latter takes the
    probability ``q``). When the full resample space is small enough
    (n**n ordered resamples fit under ``reps``), it is enumerated exactly
    instead of sampled, so tiny samples get the exact bootstrap
    distribution. Identical inputs and seed give identical output.

    Endpoints are the inner order statistics of the bootstrap distribution
    at the (1 - level)/2 tail, i.e. index floor(B * alpha / 2) from each
    end, which reproduces hand-enumerated small cases exactly.
    """
    values = np.asarray(_as_floats(sample), dtype=np.float64)
    n = len(values)
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if statistic == "mean":
        if q is not None:
            raise ValueError("q only applies to the quantile statistic")
    elif statistic == "quantile":
        if q is None or not 0.0 <= q <= 1.0:
            raise ValueError("quantile statistic needs q in [0, 1]")
    else:
        raise ValueError(f"unknown statistic {statistic!r}")

    space = n**n
    if space <= min(reps, EXACT_BOOTSTRAP_LIMIT):
        idx = np.indices((n,) * n).reshape(n, space).T.astype(np.int64)
        idx = np.ascontiguousarray(idx)
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        idx = rng.integers(0, n, size=(reps, n), dtype=np.int64)

    if statistic == "mean":
        stats = _kernels.bootstrap_means(values, idx)
    else:
        h = (n - 1) * q
        j = int(h)
        stats = _kernels.bootstrap_quantiles(values, idx, j, h - j)

    stats = np.sort(stats)
    edge = int(len(stats) * (1.0 - level) / 2.0)
    return Interval(
        lower=float(stats[edge]),
        upper=float(stats[len(stats) - 1 - edge]),
        level=level,
    )

"""NumPy/pure-Python kernel implementations.

Reference semantics for the compiled backend: both must return bit-identical
results. Floating-point accumulation order is therefore pinned down:

* subset sums fold costs in ascending bit order (the doubling construction
  below is exactly that fold),
* bootstrap means accumulate resampled values left to right (``cumsum``),
* quantile interpolation uses the expression ``lo + frac * (hi - lo)``.
"""

from __future__ import annotations

import itertools

import numpy as np

BACKEND = "pure"


def lex_mask_smaller(m1: int, m2: int) -> bool:
    """True if bitmask ``m1`` denotes the lexicographically smaller index set.

    Index sets are compared as ascending sequences, shorter prefix first:
    {0,2} < {1} and {0} < {0,1}.
    """
    while m1 and m2:
        low1 = m1 & -m1
        low2 = m2 & -m2
        if low1 != low2:
            return low1 < low2
        m1 ^= low1
        m2 ^= low2
    return m2 != 0


def exhaustive_best_subset(costs, benefits, budget):
    """Best-net-benefit subset under a budget, over all 2**n subsets.

    Returns ``(mask, total_cost, total_benefit)`` maximizing benefit - cost
    subject to cost <= budget; ties resolve to the lexicographically
    smallest index set. The empty subset is always feasible for budget >= 0.
    """
    costs = np.ascontiguousarray(costs, dtype=np.float64)
    benefits = np.ascontiguousarray(benefits, dtype=np.float64)
    n = costs.shape[0]
    csum = np.zeros(1, dtype=np.float64)
    bsum = np.zeros(1, dtype=np.float64)
    for i in range(n):
        csum = np.concatenate([csum, csum + costs[i]])
        bsum = np.concatenate([bsum, bsum + benefits[i]])
    feasible = csum <= budget
    if not feasible.any():
        raise ValueError("budget must be >= 0")
    net = bsum - csum
    best_net = net[feasible].max()
    ties = np.flatnonzero(feasible & (net == best_net))
    best = int(ties[0])
    for m in ties[1:]:
        if lex_mask_smaller(int(m), best):
            best = int(m)
    return best, float(csum[best]), float(bsum[best])


def bootstrap_means(values, idx):
    """Mean of each resample row; values indexed by an integer matrix."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    picked = values[idx]
    return np.cumsum(picked, axis=1)[:, -1] / idx.shape[1]


def bootstrap_quantiles(values, idx, j, frac):
    """Interpolated order statistic of each resample row.

    ``j`` and ``frac`` are the precomputed integer part and fractional part
    of the interpolation position (n - 1) * q.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    picked = np.sort(values[idx], axis=1)
    n = idx.shape[1]
    if j + 1 >= n:
        return picked[:, j].copy()
    lo = picked[:, j]
    hi = picked[:, j + 1]
    return lo + frac * (hi - lo)


def mwu_extreme_count(dmid, n_a, obs_dev):
    """Count assignments at least as extreme as the observed rank-sum.

    ``dmid`` holds doubled midranks of the combined sample (integers);
    picking ``n_a`` of them defines one assignment. An assignment is extreme
    when its doubled rank-sum deviates from the null center n_a * (N + 1) by
    at least ``obs_dev``.
    """
    dmid = [int(d) for d in dmid]
    center = n_a * (len(dmid) + 1)
    count = 0
    for combo in itertools.combinations(dmid, n_a):
        if abs(sum(combo) - center) >= obs_dev:
            count += 1
    return count

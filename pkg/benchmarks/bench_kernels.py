#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure fallback.

Runs each hot kernel on a representative workload with both backends,
checks the outputs are bit-identical, and prints the timings. Usage:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from refcast._kernels import _pure

try:
    from refcast._kernels import _speedups
except ImportError:
    _speedups = None


def _time(fn, repeat=5):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _report(name, pure_s, fast_s):
    speedup = pure_s / fast_s if fast_s > 0 else float("inf")
    print(f"{name:28s} pure {pure_s * 1e3:9.2f} ms   "
          f"cython {fast_s * 1e3:9.2f} ms   x{speedup:.1f}")


def bench_exhaustive(rng):
    n = 18
    costs = rng.uniform(50, 500, n)
    benefits = rng.uniform(40, 900, n)
    budget = float(costs.sum() / 2)
    pure_s, pure_res = _time(lambda: _pure.exhaustive_best_subset(costs, benefits, budget))
    fast_s, fast_res = _time(lambda: _speedups.exhaustive_best_subset(costs, benefits, budget))
    assert pure_res == fast_res, (pure_res, fast_res)
    _report(f"exhaustive subset (n={n})", pure_s, fast_s)


def bench_bootstrap(rng):
    values = rng.normal(40, 30, 258)
    idx = rng.integers(0, len(values), size=(20_000, len(values)))
    pure_s, pure_means = _time(lambda: _pure.bootstrap_means(values, idx))
    fast_s, fast_means = _time(lambda: _speedups.bootstrap_means(values, idx))
    assert np.array_equal(pure_means, fast_means)
    _report("bootstrap means (20k x 258)", pure_s, fast_s)

    pure_s, pure_q = _time(lambda: _pure.bootstrap_quantiles(values, idx, 231, 0.3))
    fast_s, fast_q = _time(lambda: _speedups.bootstrap_quantiles(values, idx, 231, 0.3))
    assert np.array_equal(pure_q, fast_q)
    _report("bootstrap quantiles", pure_s, fast_s)


def bench_mwu(rng):
    values = rng.normal(size=14)
    dmid = np.argsort(np.argsort(values)) * 2 + 2  # distinct doubled ranks
    pure_s, pure_count = _time(lambda: _pure.mwu_extreme_count(dmid, 7, 30))
    fast_s, fast_count = _time(lambda: _speedups.mwu_extreme_count(dmid, 7, 30))
    assert pure_count == fast_count
    _report("mwu enumeration C(14,7)", pure_s, fast_s)


def main():
    if _speedups is None:
        print("compiled kernels unavailable; nothing to compare")
        return
    rng = np.random.Generator(np.random.PCG64(1))
    print("kernel benchmarks (best of 5, outputs verified identical)")
    bench_exhaustive(rng)
    bench_bootstrap(rng)
    bench_mwu(rng)


if __name__ == "__main__":
    main()

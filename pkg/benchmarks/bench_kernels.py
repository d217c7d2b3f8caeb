#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs each kernel with identical inputs on both backends and prints a
timing table plus the speedup. Outputs are cross-checked for equality
while we are at it.
"""

import math
import time

import numpy as np

from primebias import _kernels_py as kpy

try:
    from primebias import _kernels as kcy
except ImportError:
    kcy = None


def simple_primes(limit):
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def time_call(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_sieve(limit):
    base = simple_primes(math.isqrt(limit))

    def run(backend):
        parts = []
        lo = 3
        while lo <= limit:
            hi = min(lo + (1 << 18), limit + 1)
            parts.append(backend.sieve_segment(lo, hi, base))
            lo = hi if hi % 2 == 1 else hi + 1
        return np.concatenate([np.array([2], dtype=np.int64)] + parts)

    return run


def main():
    if kcy is None:
        print("compiled kernels not built; run pip install -e . first")
        return

    limit = 10**7
    primes = simple_primes(limit)
    minus = primes[primes % 4 == 3]

    rows = []

    sieve = bench_sieve(limit)
    t_py, out_py = time_call(lambda: sieve(kpy))
    t_cy, out_cy = time_call(lambda: sieve(kcy))
    assert np.array_equal(out_py, out_cy)
    rows.append(("sieve_segment (to 1e7)", t_py, t_cy))

    for k in (2, 3, 4):
        t_py, n_py = time_call(kpy.count_tuples_leq, minus, limit, k)
        t_cy, n_cy = time_call(kcy.count_tuples_leq, minus, limit, k)
        assert n_py == n_cy
        rows.append((f"count_tuples_leq (k={k}, 1e7)", t_py, t_cy))

    t_py, s_py = time_call(kpy.inv_sum, minus)
    t_cy, s_cy = time_call(kcy.inv_sum, minus)
    assert abs(s_py - s_cy) < 1e-12
    rows.append(("inv_sum (~330k primes)", t_py, t_cy))

    print(f"{'kernel':<30} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, t_py, t_cy in rows:
        print(f"{name:<30} {t_py*1e3:>8.1f}ms {t_cy*1e3:>8.1f}ms {t_py/t_cy:>7.1f}x")


if __name__ == "__main__":
    main()

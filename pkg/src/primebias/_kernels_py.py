"""Pure-Python (numpy) implementations of the hot kernels.

Same contracts as the compiled extension in _kernels.pyx; selected by
primebias.kernels when the extension is absent or PRIMEBIAS_PURE is set.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def sieve_segment(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """Primes in [low, high) for odd low >= 3.

    `base` must hold all primes <= sqrt(high - 1) (2 is ignored). Only odd
    candidates are represented; composites are cleared by strided writes.
    """
    n_odd = (high - low + 1) // 2
    if n_odd <= 0:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n_odd, dtype=bool)
    for p in base:
        p = int(p)
        if p == 2:
            continue
        if p * p >= high:
            break
        start = max(p * p, ((low + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start >= high:
            continue
        mask[(start - low) // 2 :: p] = False
    return low + 2 * np.flatnonzero(mask).astype(np.int64)


def count_tuples_leq(P: np.ndarray, x: int, k: int) -> int:
    """Number of nondecreasing k-tuples from sorted array P with product <= x.

    The last level is resolved by a rank query instead of iteration.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    P = np.ascontiguousarray(P, dtype=np.int64)

    def rec(bound: int, start: int, depth: int) -> int:
        if depth == 1:
            hi = int(np.searchsorted(P, bound, side="right"))
            return max(0, hi - start)
        total = 0
        for i in range(start, len(P)):
            p = int(P[i])
            # remaining depth factors are all >= p, so p**depth must fit
            if p ** depth > bound:
                break
            total += rec(bound // p, i, depth - 1)
        return total

    return rec(int(x), 0, k)


def inv_sum(P: np.ndarray) -> float:
    """Compensated sum of 1/p over P in array order (exactly rounded)."""
    return math.fsum(np.reciprocal(np.asarray(P, dtype=np.float64)))

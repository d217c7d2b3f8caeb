# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: segmented sieve, bounded tuple enumeration, compensated sums.

Contracts match primebias._kernels_py exactly; integer outputs are
bit-identical to the fallback and float outputs agree to ~1 ulp.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

BACKEND = "cython"


def sieve_segment(long long low, long long high, cnp.int64_t[::1] base):
    """Primes in [low, high) for odd low >= 3; base covers sqrt(high - 1)."""
    cdef Py_ssize_t n = (high - low + 1) // 2 if high > low else 0
    if n <= 0:
        return np.empty(0, dtype=np.int64)
    mask_arr = np.ones(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] mask = mask_arr
    cdef Py_ssize_t i, j, nbase = base.shape[0]
    cdef Py_ssize_t cnt = 0, w = 0
    cdef long long p, start
    with nogil:
        for i in range(nbase):
            p = base[i]
            if p == 2:
                continue
            if p * p >= high:
                break
            start = ((low + p - 1) // p) * p
            if start < p * p:
                start = p * p
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            j = (start - low) // 2
            while j < n:
                mask[j] = 0
                j += p
        for j in range(n):
            cnt += mask[j]
    out_arr = np.empty(cnt, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    with nogil:
        for j in range(n):
            if mask[j]:
                out[w] = low + 2 * j
                w += 1
    return out_arr


cdef Py_ssize_t _upper_rank(const cnp.int64_t[::1] P, long long bound) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = P.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if P[mid] <= bound:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef long long _count_rec(const cnp.int64_t[::1] P, long long bound,
                          Py_ssize_t start, int depth) noexcept nogil:
    cdef long long total = 0, p, pw
    cdef Py_ssize_t i, n = P.shape[0], hi
    cdef int t, fits
    if depth == 1:
        hi = _upper_rank(P, bound)
        return hi - start if hi > start else 0
    for i in range(start, n):
        p = P[i]
        # remaining factors are all >= p: stop once p**depth > bound
        pw = p
        fits = 1
        for t in range(depth - 1):
            if pw > bound // p:
                fits = 0
                break
            pw *= p
        if not fits:
            break
        total += _count_rec(P, bound // p, i, depth - 1)
    return total


def count_tuples_leq(P, long long x, int k):
    """Number of nondecreasing k-tuples from sorted array P with product <= x."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cdef cnp.int64_t[::1] view = np.ascontiguousarray(P, dtype=np.int64)
    cdef long long out
    with nogil:
        out = _count_rec(view, x, 0, k)
    return out


def inv_sum(P):
    """Neumaier-compensated sum of 1/p over P in array order."""
    cdef cnp.int64_t[::1] view = np.ascontiguousarray(P, dtype=np.int64)
    cdef double s = 0.0, c = 0.0, x, t
    cdef Py_ssize_t i
    with nogil:
        for i in range(view.shape[0]):
            x = 1.0 / view[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c

"""Segmented prime generation and class-restricted prime counting.

build_primes produces the complete sorted prime list up to a limit via an
odd-only segmented sieve; segments can be handed to a worker pool and are
merged in segment order, so output is identical for any worker count and
segment size. ClassifiedPrimeCounts layers per-class prefix sums over the
prime list so that pi_eta(B) = #{p <= B : chi(p) = eta} is a binary search
plus two array reads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .characters import QuadraticCharacter
from .errors import ResourceLimitError, UsageError

DEFAULT_SEGMENT = 1 << 18  # numbers per segment; roughly L2-cache sized
DEFAULT_CEILING = 1 << 31


@dataclass(frozen=True)
class PrimeStore:
    """All primes <= limit, strictly increasing, as an int64 array."""

    limit: int
    primes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.primes)

    def rank(self, B) -> int | np.ndarray:
        """Number of primes <= B (vectorized over arrays)."""
        idx = np.searchsorted(self.primes, B, side="right")
        return int(idx) if np.isscalar(B) else idx


def _small_primes(limit: int) -> np.ndarray:
    """Plain byte-mask sieve, used only for base primes up to sqrt(limit)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def build_primes(
    limit: int,
    *,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
    ceiling: int = DEFAULT_CEILING,
    cache_path: str | Path | None = None,
) -> PrimeStore:
    """Complete sorted prime list up to `limit`.

    Segments of `segment_size` numbers are sieved (in a thread pool when
    workers > 1) and concatenated in segment order. With `cache_path` set,
    a previously written cache for the same limit is reused and a fresh
    result is written back; cached and sieved results are identical.
    """
    if limit < 2:
        raise UsageError(f"sieve limit must be >= 2, got {limit}")
    if limit > ceiling:
        raise ResourceLimitError(
            f"sieve limit {limit} exceeds the configured ceiling {ceiling}"
        )
    if segment_size < 64:
        raise UsageError(f"segment size too small: {segment_size}")

    if cache_path is not None:
        cached = _read_cache(Path(cache_path), limit)
        if cached is not None:
            return PrimeStore(limit=limit, primes=cached)

    base = _small_primes(math.isqrt(limit))
    segs = []
    lo = 3
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        segs.append((lo, hi))
        lo = hi if hi % 2 == 1 else hi + 1  # skipped even bound is composite

    if workers > 1 and len(segs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: kernels.sieve_segment(s[0], s[1], base), segs))
    else:
        parts = [kernels.sieve_segment(lo, hi, base) for lo, hi in segs]

    head = np.array([2], dtype=np.int64) if limit >= 2 else np.empty(0, dtype=np.int64)
    primes = np.concatenate([head] + parts) if parts else head

    if cache_path is not None:
        _write_cache(Path(cache_path), primes)
    return PrimeStore(limit=limit, primes=primes)


# --- binary prime cache -------------------------------------------------
# Format: 8-byte little-endian count, then one varint per prime holding the
# delta from the previous prime (the first delta is the first prime itself).
# Varints are 7 bits per byte, least-significant group first, high bit set
# on continuation bytes.


def _write_varints(deltas: np.ndarray) -> bytearray:
    out = bytearray()
    for d in deltas.tolist():
        while d >= 0x80:
            out.append((d & 0x7F) | 0x80)
            d >>= 7
        out.append(d)
    return out


def _read_varints(buf: bytes, count: int) -> np.ndarray:
    vals = np.empty(count, dtype=np.int64)
    pos = 0
    for i in range(count):
        shift = 0
        acc = 0
        while True:
            b = buf[pos]
            pos += 1
            acc |= (b & 0x7F) << shift
            if b < 0x80:
                break
            shift += 7
        vals[i] = acc
    if pos != len(buf):
        raise UsageError("prime cache file has trailing garbage")
    return vals


def _write_cache(path: Path, primes: np.ndarray) -> None:
    deltas = np.diff(primes, prepend=np.int64(0))
    blob = len(primes).to_bytes(8, "little") + bytes(_write_varints(deltas))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)


def _read_cache(path: Path, limit: int) -> np.ndarray | None:
    if not path.is_file():
        return None
    blob = path.read_bytes()
    if len(blob) < 8:
        raise UsageError(f"prime cache {path} is truncated")
    count = int.from_bytes(blob[:8], "little")
    primes = np.cumsum(_read_varints(blob[8:], count))
    if len(primes) and primes[-1] > limit:
        raise UsageError(
            f"prime cache {path} was built for a different limit (> {limit})"
        )
    return primes.astype(np.int64)


def cache_file_for(limit: int, cache_dir: str | Path) -> Path:
    """Cache file path keyed by limit."""
    return Path(cache_dir) / f"primes_{limit}.bin"


# --- class-restricted counting ------------------------------------------


@dataclass(frozen=True)
class ClassifiedPrimeCounts:
    """Prefix counts of primes by character class.

    Stores cumulative counts for classes +1 and 0 only; class -1 is the
    rank minus the other two.
    """

    character: QuadraticCharacter
    store: PrimeStore
    _cum_plus: np.ndarray = field(repr=False)
    _cum_zero: np.ndarray = field(repr=False)

    @property
    def limit(self) -> int:
        return self.store.limit

    def query(self, B, eta: int):
        """#{p prime <= B : chi(p) = eta}; supports vectorized B."""
        scalar = np.isscalar(B)
        B_arr = np.asarray(B)
        if np.any(B_arr < 0) or np.any(B_arr > self.limit):
            raise UsageError(f"query bound outside [0, {self.limit}]")
        idx = np.searchsorted(self.store.primes, B_arr, side="right")
        if eta == 1:
            out = self._cum_plus[idx]
        elif eta == 0:
            out = self._cum_zero[idx]
        elif eta == -1:
            out = idx - self._cum_plus[idx] - self._cum_zero[idx]
        else:
            raise UsageError(f"class label must be -1, 0, or +1, got {eta}")
        return int(out) if scalar else out

    def class_primes(self, eta: int) -> np.ndarray:
        """Sorted array of the primes in class eta."""
        vals = self.character.eval_array(self.store.primes)
        return self.store.primes[vals == eta]


def classified_counts(store: PrimeStore, chi: QuadraticCharacter) -> ClassifiedPrimeCounts:
    """Attach per-class prefix sums for chi to a prime store."""
    vals = chi.eval_array(store.primes)
    cum_plus = np.zeros(len(vals) + 1, dtype=np.int64)
    cum_zero = np.zeros(len(vals) + 1, dtype=np.int64)
    np.cumsum(vals == 1, out=cum_plus[1:])
    np.cumsum(vals == 0, out=cum_zero[1:])
    return ClassifiedPrimeCounts(chi, store, cum_plus, cum_zero)

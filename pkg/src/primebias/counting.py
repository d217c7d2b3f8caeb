"""Exact empirical counts of classified prime products.

Every displayed ratio has the shape

    count(class-restricted products <= x) / (normalizer * total),

so each operation returns a BiasReport carrying the raw integers alongside
the ratio and the analytic prediction. Semiprime counting walks the outer
prime p <= sqrt(x) and resolves the inner prime q in [p, x/p] with rank
queries; k-factor and mixed-tuple counts enumerate nondecreasing prime
tuples with the innermost level resolved the same way.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import analytic, kernels
from .characters import QuadraticCharacter, ResidueClassPredicate
from .errors import UsageError
from .sieve import ClassifiedPrimeCounts, PrimeStore, build_primes, classified_counts

ORACLE_CEILING = 10**6

PAIR_KEYS = ((1, 1), (1, -1), (-1, -1))


@dataclass(frozen=True)
class SemiprimeClassCounts:
    """Counts of n = p*q <= x by unordered class pair under one character."""

    x: int
    character: QuadraticCharacter
    counts: dict
    ramified: int
    total_coprime: int
    strict: bool = False

    @property
    def total(self) -> int:
        return self.total_coprime + self.ramified


@dataclass(frozen=True)
class BiasReport:
    """One experiment row: empirical count and ratio next to the prediction."""

    x: int
    label: str
    count: int
    total: int
    normalizer: float
    ratio: float
    predicted: Optional[float]
    lchi: Optional[float]
    beta: Optional[float] = None


@dataclass(frozen=True)
class WeightedRaceResult:
    """Reciprocal-weighted class sums S_eta = sum of 1/p over chi(p) = eta."""

    x: int
    s_plus: float
    s_minus: float
    ratio: float  # S_plus / S_minus
    predicted: Optional[float]  # 1 + 2 L_chi / loglog x, when x is large enough


def _require_counts(
    x: int, chi: QuadraticCharacter, counts: Optional[ClassifiedPrimeCounts]
) -> ClassifiedPrimeCounts:
    if counts is None:
        return classified_counts(build_primes(x), chi)
    if counts.limit < x:
        raise UsageError(f"classified counts reach {counts.limit} < required {x}")
    if counts.character.discriminant != chi.discriminant:
        raise UsageError("classified counts were built for a different character")
    return counts


def count_semiprimes_by_class(
    x: int,
    chi: QuadraticCharacter,
    *,
    counts: Optional[ClassifiedPrimeCounts] = None,
    strict: bool = False,
) -> SemiprimeClassCounts:
    """Exact class-pair counts of semiprimes up to x.

    For each prime p <= sqrt(x), the partner q ranges over [p, x/p]
    (or (p, x/p] with strict=True, excluding squares); the per-class count
    of that interval is two rank queries.
    """
    if x < 4:
        raise UsageError(f"semiprime counting needs x >= 4, got {x}")
    counts = _require_counts(x, chi, counts)
    primes = counts.store.primes
    outer = primes[: int(np.searchsorted(primes, math.isqrt(x), side="right"))]
    if len(outer) == 0:
        return SemiprimeClassCounts(x, chi, dict.fromkeys(PAIR_KEYS, 0), 0, 0, strict)

    hi = x // outer
    lo = outer if strict else outer - 1
    inner = {eta: counts.query(hi, eta) - counts.query(lo, eta) for eta in (1, -1, 0)}
    outer_class = chi.eval_array(outer)

    pair = dict.fromkeys(PAIR_KEYS, 0)
    ramified = 0
    for cp in (1, -1, 0):
        sel = outer_class == cp
        for eta in (1, -1, 0):
            n = int(inner[eta][sel].sum())
            if cp == 0 or eta == 0:
                ramified += n
            else:
                pair[(max(cp, eta), min(cp, eta))] += n
    total_coprime = sum(pair.values())
    return SemiprimeClassCounts(x, chi, pair, ramified, total_coprime, strict)


def ratio_r(
    x: int,
    chi: QuadraticCharacter,
    eta: int,
    *,
    counts: Optional[ClassifiedPrimeCounts] = None,
    strict: bool = False,
    lchi_value: Optional[float] = None,
) -> BiasReport:
    """The headline ratio: same-class semiprimes against a quarter of the
    coprime total, with the predicted 1 + eta*L_chi/loglog x."""
    if x < 9:
        raise UsageError(f"the semiprime ratio needs x >= 9, got {x}")
    if eta not in (1, -1):
        raise UsageError(f"eta must be +1 or -1, got {eta}")
    sc = count_semiprimes_by_class(x, chi, counts=counts, strict=strict)
    if sc.total_coprime == 0:
        raise UsageError(f"degenerate input: no semiprimes <= {x} coprime to the conductor")
    n = sc.counts[(eta, eta)]
    ratio = n / (0.25 * sc.total_coprime)
    if lchi_value is None:
        lchi_value = analytic.lchi_cached(chi).value
    predicted = analytic.predict("semiprime", x, eta=eta, lchi_value=lchi_value).ratio
    return BiasReport(
        x=x,
        label=f"{chi}: chi(p)=chi(q)={eta:+d}",
        count=n,
        total=sc.total_coprime,
        normalizer=0.25,
        ratio=ratio,
        predicted=predicted,
        lchi=lchi_value,
    )


def count_k_almost(
    x: int,
    k: int,
    chi: QuadraticCharacter,
    eta: int,
    *,
    counts: Optional[ClassifiedPrimeCounts] = None,
    lchi_value: Optional[float] = None,
) -> BiasReport:
    """Products of k primes (with multiplicity) all of class eta, against
    1/2^k of those with every factor coprime to the conductor."""
    if not 2 <= k <= 8:
        raise UsageError(f"k must be in 2..8, got {k}")
    if eta not in (1, -1):
        raise UsageError(f"eta must be +1 or -1, got {eta}")
    if x < 2**k:
        raise UsageError(f"x = {x} admits no product of {k} primes")
    counts = _require_counts(x, chi, counts)
    primes = counts.store.primes
    primes = primes[primes <= x]
    vals = counts.character.eval_array(primes)
    selected = int(kernels.count_tuples_leq(primes[vals == eta], x, k))
    total = int(kernels.count_tuples_leq(primes[vals != 0], x, k))
    if total == 0:
        raise UsageError(f"degenerate input: no {k}-almost-primes <= {x} coprime to the conductor")
    ratio = selected / (total / 2.0**k)
    if lchi_value is None:
        lchi_value = analytic.lchi_cached(chi).value
    predicted = analytic.predict("kfactor", x, eta=eta, k=k, lchi_value=lchi_value).ratio
    return BiasReport(
        x=x,
        label=f"{chi}: {k} factors, all chi = {eta:+d}",
        count=selected,
        total=total,
        normalizer=2.0**-k,
        ratio=ratio,
        predicted=predicted,
        lchi=lchi_value,
    )


# --- mixed per-position specs ------------------------------------------------


@lru_cache(maxsize=65536)
def _arrangements(pattern: tuple, masks: tuple) -> int:
    """Distinct orderings of a multiset that put an allowed value in every slot.

    `pattern` maps the multiset to equality classes (first-occurrence index)
    and `masks` gives each element's allowed-slot bitmask.
    """
    k = len(pattern)
    seen = set()
    total = 0
    for perm in itertools.permutations(range(k)):
        seq = tuple(pattern[i] for i in perm)
        if seq in seen:
            continue
        seen.add(seq)
        if all((masks[perm[j]] >> j) & 1 for j in range(k)):
            total += 1
    return total


def _ordered_tuple_count(primes: np.ndarray, masks: np.ndarray, x: int, k: int) -> int:
    """Ordered k-tuples of primes with product <= x and slot j drawn from the
    primes whose mask has bit j set.

    Enumerates nondecreasing tuples and weights each by its number of
    admissible distinct orderings.
    """
    n = len(primes)
    out = 0
    stack_vals: list[int] = []
    stack_masks: list[int] = []

    def rec(start: int, bound: int, depth: int):
        nonlocal out
        if depth == 0:
            pattern = []
            first = {}
            for v in stack_vals:
                pattern.append(first.setdefault(v, len(first)))
            out += _arrangements(tuple(pattern), tuple(stack_masks))
            return
        for i in range(start, n):
            p = int(primes[i])
            if p ** depth > bound:
                break
            stack_vals.append(p)
            stack_masks.append(int(masks[i]))
            rec(i, bound // p, depth - 1)
            stack_vals.pop()
            stack_masks.pop()

    rec(0, x, k)
    return out


def count_mixed(
    x: int,
    specs: Sequence[tuple[QuadraticCharacter, int]],
    *,
    store: Optional[PrimeStore] = None,
    tol: float = 1e-9,
) -> BiasReport:
    """Ordered k-tuples (p_1, ..., p_k) with product <= x and chi_j(p_j) = eta_j,
    against 1/2^k of the ordered tuples with every (p_j, d_j) = 1."""
    specs = list(specs)
    k = len(specs)
    if k == 0:
        raise UsageError("count_mixed needs at least one (character, eta) spec")
    if k > 6:
        raise UsageError(f"count_mixed supports at most 6 positions, got {k}")
    for _, eta in specs:
        if eta not in (1, -1):
            raise UsageError(f"eta must be +1 or -1, got {eta}")
    if x < 2**k:
        raise UsageError(f"x = {x} admits no product of {k} primes")
    if store is None:
        store = build_primes(x)
    elif store.limit < x:
        raise UsageError(f"prime store reaches {store.limit} < required {x}")
    primes = store.primes[store.primes <= x]

    sel_masks = np.zeros(len(primes), dtype=np.int64)
    tot_masks = np.zeros(len(primes), dtype=np.int64)
    for j, (chi, eta) in enumerate(specs):
        vals = chi.eval_array(primes)
        sel_masks |= (vals == eta).astype(np.int64) << j
        tot_masks |= (vals != 0).astype(np.int64) << j

    sel_keep = sel_masks != 0
    tot_keep = tot_masks != 0
    selected = _ordered_tuple_count(primes[sel_keep], sel_masks[sel_keep], x, k)
    total = _ordered_tuple_count(primes[tot_keep], tot_masks[tot_keep], x, k)
    if total == 0:
        raise UsageError(f"degenerate input: no admissible {k}-tuples with product <= {x}")
    ratio = selected / (total / 2.0**k)
    c = analytic.c_vec(specs, tol)
    predicted = analytic.predict("mixed", x, k=k, c=c).ratio if x >= 16 else None
    label = ", ".join(f"chi_{chi.discriminant}={eta:+d}" for chi, eta in specs)
    return BiasReport(
        x=x,
        label=label,
        count=selected,
        total=total,
        normalizer=2.0**-k,
        ratio=ratio,
        predicted=predicted,
        lchi=c,
    )


def weighted_race(
    x: int,
    chi: QuadraticCharacter,
    *,
    counts: Optional[ClassifiedPrimeCounts] = None,
    lchi_value: Optional[float] = None,
) -> WeightedRaceResult:
    """S_+ and S_- (sums of 1/p per class up to x), compensated, in
    increasing prime order, with the prediction for S_+/S_-."""
    if x < 7:
        raise UsageError(f"weighted race needs x >= 7, got {x}")
    counts = _require_counts(x, chi, counts)
    primes = counts.store.primes
    primes = primes[primes <= x]
    vals = counts.character.eval_array(primes)
    s_plus = kernels.inv_sum(primes[vals == 1])
    s_minus = kernels.inv_sum(primes[vals == -1])
    if s_minus == 0.0:
        raise UsageError(f"no primes of class -1 up to {x}")
    if lchi_value is None:
        lchi_value = analytic.lchi_cached(chi).value
    predicted = (
        analytic.predict("weighted", x, lchi_value=lchi_value).ratio if x >= 16 else None
    )
    return WeightedRaceResult(
        x=x, s_plus=s_plus, s_minus=s_minus, ratio=s_plus / s_minus, predicted=predicted
    )


def _euler_phi(m: int) -> int:
    out = m
    d = 2
    while d * d <= m:
        if m % d == 0:
            out -= out // d
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out -= out // m
    return out


def _validate_class_set(preds: Sequence[ResidueClassPredicate], name: str) -> tuple[int, frozenset]:
    preds = list(preds)
    if not preds:
        raise UsageError(f"progression class set {name} is empty")
    modulus = preds[0].modulus
    for pr in preds:
        if pr.modulus != modulus:
            raise UsageError(f"class set {name} mixes moduli {modulus} and {pr.modulus}")
    return modulus, frozenset(pr.residue for pr in preds)


def progression_pair_ratio(
    x: int,
    a_set: Sequence[ResidueClassPredicate],
    b_set: Sequence[ResidueClassPredicate],
    *,
    store: Optional[PrimeStore] = None,
) -> BiasReport:
    """Ordered prime pairs (p, q), pq <= x, with p mod m in A and q mod n in B,
    normalized by |A||B|/(phi(m) phi(n)) of the ordered coprime total.

    The empirical (ratio - 1) * loglog x is reported as the beta estimate.
    """
    if x < 4:
        raise UsageError(f"progression pairs need x >= 4, got {x}")
    m, a_res = _validate_class_set(a_set, "A")
    n, b_res = _validate_class_set(b_set, "B")
    if store is None:
        store = build_primes(x)
    elif store.limit < x:
        raise UsageError(f"prime store reaches {store.limit} < required {x}")
    primes = store.primes[store.primes <= x // 2]

    in_a = np.isin(primes % m, np.array(sorted(a_res), dtype=np.int64))
    in_b = np.isin(primes % n, np.array(sorted(b_res), dtype=np.int64))
    cop_a = np.gcd(primes, m) == 1
    cop_b = np.gcd(primes, n) == 1

    def ordered_pairs(mask_p: np.ndarray, mask_q: np.ndarray) -> int:
        cum_q = np.concatenate(([0], np.cumsum(mask_q)))
        ps = primes[mask_p]
        ranks = np.searchsorted(primes, x // ps, side="right")
        return int(cum_q[ranks].sum())

    count = ordered_pairs(in_a, in_b)
    total = ordered_pairs(cop_a, cop_b)
    if total == 0:
        raise UsageError(f"degenerate input: no coprime prime pairs with product <= {x}")
    normalizer = (len(a_res) * len(b_res)) / (_euler_phi(m) * _euler_phi(n))
    ratio = count / (normalizer * total)
    beta = (ratio - 1.0) * analytic.loglog(x) if x >= 16 else None
    return BiasReport(
        x=x,
        label=f"p in {sorted(a_res)} (mod {m}), q in {sorted(b_res)} (mod {n})",
        count=count,
        total=total,
        normalizer=normalizer,
        ratio=ratio,
        predicted=None,
        lchi=None,
        beta=beta,
    )


# --- trial-division oracle ----------------------------------------------------


@lru_cache(maxsize=6)
def _factor_table(x: int) -> list:
    """fac[n] = sorted tuple of prime factors of n with multiplicity, n <= x."""
    spf = np.zeros(x + 1, dtype=np.int64)
    for p in range(2, math.isqrt(x) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest

    fac: list = [()] * (x + 1)
    for n in range(2, x + 1):
        p = int(spf[n])
        fac[n] = (p,) + fac[n // p]  # spf(n) <= every factor of n//p: nondecreasing
    return fac


def naive_oracle(x: int, predicate, k: int = 2) -> int:
    """Reference count by trial-division factorization of every n <= x.

    Selects n with exactly k prime factors with multiplicity and sums
    predicate(factors); the predicate may return a bool or an integer
    weight (e.g. the number of admissible orderings).
    """
    if x > ORACLE_CEILING:
        raise UsageError(f"oracle ceiling is {ORACLE_CEILING}, got x = {x}")
    if x < 2:
        return 0
    fac = _factor_table(x)
    total = 0
    for n in range(2, x + 1):
        f = fac[n]
        if len(f) == k:
            total += int(predicate(f))
    return total


def oracle_semiprime_class_counts(
    x: int, chi: QuadraticCharacter, *, strict: bool = False
) -> SemiprimeClassCounts:
    """SemiprimeClassCounts recomputed through the factorization oracle."""
    pair = dict.fromkeys(PAIR_KEYS, 0)
    ramified = 0

    def tally(f):
        nonlocal ramified
        if strict and f[0] == f[1]:
            return 0
        a, b = chi.eval(f[0]), chi.eval(f[1])
        if a == 0 or b == 0:
            ramified += 1
        else:
            pair[(max(a, b), min(a, b))] += 1
        return 0

    naive_oracle(x, tally, k=2)
    total_coprime = sum(pair.values())
    return SemiprimeClassCounts(x, chi, pair, ramified, total_coprime, strict)

"""Invariant and oracle suite behind `primebias selftest`.

Runs every invariant from the characters, sieve, counting, and analytic
modules, printing one PASS/FAIL line per check. Exits nonzero if any
check fails.
"""

from __future__ import annotations

import math
import random

import numpy as np

from . import analytic, counting
from .characters import is_fundamental_discriminant, make_character
from .sieve import build_primes, classified_counts

ORACLE_XS = (1000, 3000, 10_000, 100_000)
ORACLE_DISCS = (-4, 5, 8, -3)
IDENTITY_DISCS = (-4, 5, 8, -3, 12, -7)


def _fundamental_discs(bound: int) -> list:
    return [D for D in range(-bound, bound + 1) if is_fundamental_discriminant(D)]


def check_multiplicativity(rng):
    for _ in range(10_000):
        D = rng.choice(IDENTITY_DISCS)
        chi = make_character(D)
        m = rng.randint(1, 10**6)
        n = rng.randint(1, 10**6)
        if chi.eval(m * n) != chi.eval(m) * chi.eval(n):
            return False, f"eval({m}*{n}) != eval({m})*eval({n}) for D={D}"
    return True, "10^4 random pairs, eval(mn) = eval(m)eval(n)"


def check_euler_criterion(primes):
    small = primes[primes <= 10_000]
    for D in IDENTITY_DISCS:
        chi = make_character(D)
        for p in small.tolist():
            if p == 2 or D % p == 0:
                continue
            e = pow(D % p, (p - 1) // 2, p)
            e = 1 if e == 1 else -1 if e == p - 1 else 0
            if chi.eval(p) != e:
                return False, f"chi_{D}({p}) != Euler criterion value {e}"
    return True, "eval(p) matches Euler criterion for odd p up to 10^4"


def check_periodicity():
    for D in IDENTITY_DISCS:
        chi = make_character(D)
        d = chi.conductor
        for n in range(1, 100_001):
            if math.gcd(n, d) == 1 and chi.eval(n) != chi.eval(n % d if n % d else d):
                return False, f"chi_{D} not periodic at n={n}"
    return True, "eval(n) = eval(n mod d) for coprime n up to 10^5"


def check_character_sums():
    for D in _fundamental_discs(500):
        chi = make_character(D)
        if int(chi.eval_array(np.arange(1, chi.conductor + 1)).sum()) != 0:
            return False, f"character sum over a period is nonzero for D={D}"
    return True, "sum over a full period is 0 for every fundamental |D| <= 500"


def _naive_primes(limit):
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def check_sieve_vs_naive(rng):
    naive = _naive_primes(10**6)
    for limit in (10**3, 10**4, 10**5, 10**6):
        seg = build_primes(limit).primes
        if not np.array_equal(seg, naive[naive <= limit]):
            return False, f"segmented != naive at limit {limit}"
    for _ in range(100):
        limit = rng.randint(10, 10**6)
        seg = build_primes(limit).primes
        if not np.array_equal(seg, naive[naive <= limit]):
            return False, f"segmented != naive at random limit {limit}"
    return True, "segmented sieve equals naive sieve at fixed and 100 random limits"


def check_sieve_determinism(workers):
    ref = build_primes(10**6).primes
    for seg in (1 << 14, 1 << 18, 999_983):
        for w in (1, workers):
            got = build_primes(10**6, segment_size=seg, workers=w).primes
            if not np.array_equal(ref, got):
                return False, f"output differs for segment_size={seg}, workers={w}"
    return True, "identical output across segment sizes and worker counts"


def check_query_steps(counts):
    primes = counts.store.primes
    chi = counts.character
    for B in range(1, 2000):
        for eta in (1, -1, 0):
            step = counts.query(B, eta) - counts.query(B - 1, eta)
            is_class_prime = B in primes and chi.eval(B) == eta
            if step not in (0, 1) or (step == 1) != bool(is_class_prime):
                return False, f"query step wrong at B={B}, eta={eta}"
    return True, "query(B) - query(B-1) is the class-prime indicator"


def check_oracle_equivalence(stores):
    for D in ORACLE_DISCS:
        chi = make_character(D)
        for x in ORACLE_XS:
            cc = classified_counts(stores[x], chi)
            fast = counting.count_semiprimes_by_class(x, chi, counts=cc)
            slow = counting.oracle_semiprime_class_counts(x, chi)
            if (fast.counts, fast.ramified, fast.total_coprime) != (
                slow.counts,
                slow.ramified,
                slow.total_coprime,
            ):
                return False, f"semiprime counts differ from oracle at x={x}, D={D}"
            for k in (2, 3):
                fk = counting.count_k_almost(x, k, chi, -1, counts=cc, lchi_value=0.0)
                ok_sel = counting.naive_oracle(x, lambda f: all(chi.eval(p) == -1 for p in f), k=k)
                ok_tot = counting.naive_oracle(x, lambda f: all(chi.eval(p) != 0 for p in f), k=k)
                if (fk.count, fk.total) != (ok_sel, ok_tot):
                    return False, f"k={k} counts differ from oracle at x={x}, D={D}"
    return True, f"exact oracle match for x in {ORACLE_XS}, D in {ORACLE_DISCS}, k in (2, 3)"


def check_class_completeness(stores):
    for D in ORACLE_DISCS:
        chi = make_character(D)
        for x in ORACLE_XS:
            cc = classified_counts(stores[x], chi)
            sc = counting.count_semiprimes_by_class(x, chi, counts=cc)
            total = counting.naive_oracle(x, lambda f: True)
            if sc.total_coprime + sc.ramified != total:
                return False, f"class pairs + ramified != total semiprimes at x={x}, D={D}"
    return True, "class pairs plus ramified equal the total semiprime count"


def check_monotonicity(stores):
    chi = make_character(-4)
    cc = classified_counts(stores[100_000], chi)
    grid = [100, 300, 1000, 3000, 10_000, 50_000, 100_000]
    prev = None
    for x in grid:
        sc = counting.count_semiprimes_by_class(x, chi, counts=cc)
        vals = [sc.counts[k] for k in counting.PAIR_KEYS] + [sc.ramified, sc.total_coprime]
        if prev is not None and any(a < b for a, b in zip(vals, prev)):
            return False, f"some count decreased moving to x={x}"
        prev = vals
    return True, "all raw counts nondecreasing in x"


def check_parallel_determinism(workers):
    chi = make_character(-4)
    a = classified_counts(build_primes(10**5, workers=1), chi)
    b = classified_counts(build_primes(10**5, workers=workers), chi)
    ra = counting.ratio_r(10**5, chi, -1, counts=a, lchi_value=0.0)
    rb = counting.ratio_r(10**5, chi, -1, counts=b, lchi_value=0.0)
    if (ra.count, ra.total, ra.ratio) != (rb.count, rb.total, rb.ratio):
        return False, f"results differ between 1 and {workers} workers"
    return True, f"identical results with 1 and {workers} workers"


def check_sign_property(store10m):
    chi = make_character(-4)
    cc = classified_counts(store10m, chi)
    for x in (10**2, 10**3, 10**4, 10**5, 10**6, 10**7):
        rep = counting.ratio_r(x, chi, -1, counts=cc, lchi_value=0.0)
        if rep.ratio <= 1.0:
            return False, f"r({x}) = {rep.ratio} <= 1"
    return True, "r(x) > 1 for x = 10^2 .. 10^7 (conjectured for all x >= 9)"


def check_identity_consistency(store):
    for D in IDENTITY_DISCS:
        chi = make_character(D)
        est = analytic.lchi_cached(chi)
        e_sum = analytic.e_prime_sum(chi, 10**6, counts=classified_counts(store, chi))
        gap = abs(est.value - math.log(est.L1) - e_sum)
        if gap >= 1e-4:
            return False, f"identity gap {gap:.2e} for D={D}"
    return True, f"|lchi - log L1 - E_prime_sum| < 1e-4 for D in {IDENTITY_DISCS}"


def check_closed_form_anchors():
    a = abs(analytic.L_at_one(make_character(-4)) - math.pi / 4)
    b = abs(
        analytic.L_at_one(make_character(5))
        - (2 / math.sqrt(5)) * math.log((1 + math.sqrt(5)) / 2)
    )
    if a > 1e-10 or b > 1e-10:
        return False, f"anchor gaps {a:.2e}, {b:.2e}"
    return True, "L(1, chi) anchors pi/4 and (2/sqrt5)log phi hold to 1e-10"


def check_corrected_bounds(store):
    p = store.primes[store.primes <= 10**6].astype(np.float64)
    inv = 1.0 / p
    tail = analytic._quadratic_prime_tail(10**6)
    full = (
        math.fsum(np.log1p(-inv) + inv) + tail,
        math.fsum(np.log1p(inv) - inv) + tail,
    )
    for D in _fundamental_discs(200):
        chi = make_character(D)
        lower, upper = analytic.corrected_e_bounds(chi, _full_sums=full)
        E = analytic.lchi_cached(chi).E
        if not (lower <= E <= upper < 0.0):
            return False, f"E(chi_{D}) = {E:.6f} outside corrected bounds ({lower:.6f}, {upper:.6f})"
    return True, "corrected bounds hold for every fundamental |D| <= 200"


def check_literal_bound_violation(out):
    est = analytic.lchi_cached(make_character(-4))
    lower, upper = analytic.e_bound_constants(limit=10**6)
    violated = est.E > upper
    out.write(
        "note: the printed all-prime upper bound does not apply to actual characters: "
        f"E(chi_-4) = {est.E:.4f} > {upper:.5f} because chi vanishes on p | d, which "
        "removes negative terms; per-character bounds exclude the ramified primes.\n"
    )
    return violated, f"literal all-prime upper bound is violated by D=-4 (E={est.E:.4f})"


def check_tolerance_honesty():
    for D in (-4, 5):
        chi = make_character(D)
        a = analytic.lchi(chi, 1e-9)
        b = analytic.lchi(chi, 1e-10)
        if abs(a.value - b.value) >= a.truncation_bound:
            return False, f"tol/10 moved lchi({D}) by more than the reported bound"
        if a.truncation_bound >= 1e-9:
            return False, f"reported bound {a.truncation_bound} exceeds requested tol"
    return True, "rerunning at tol/10 moves lchi by less than the reported bound"


def check_term_decay():
    for D in IDENTITY_DISCS:
        est = analytic.lchi_cached(make_character(D))
        for m, term in est.terms:
            if m >= 3 and abs(term) > 2.0 ** (3 - m):
                return False, f"term m={m} of lchi({D}) exceeds 2^(3-m)"
    return True, "retained Moebius terms decay within 2^(3-m) for m >= 3"


def run(out, workers: int = 4) -> bool:
    rng = random.Random(20260810)
    results = []

    def record(name, fn, *args):
        ok, detail = fn(*args)
        results.append(ok)
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")

    store10m = build_primes(10**7)
    store1m = build_primes(10**6)
    stores = {x: build_primes(x) for x in ORACLE_XS}
    counts_small = classified_counts(stores[10_000], make_character(-4))

    record("characters.multiplicativity", check_multiplicativity, rng)
    record("characters.euler_criterion", check_euler_criterion, stores[100_000].primes)
    record("characters.periodicity", check_periodicity)
    record("characters.period_sum", check_character_sums)
    record("sieve.segmented_vs_naive", check_sieve_vs_naive, rng)
    record("sieve.determinism", check_sieve_determinism, workers)
    record("sieve.query_steps", check_query_steps, counts_small)
    record("counting.oracle_equivalence", check_oracle_equivalence, stores)
    record("counting.class_completeness", check_class_completeness, stores)
    record("counting.monotonicity", check_monotonicity, stores)
    record("counting.parallel_determinism", check_parallel_determinism, workers)
    record("counting.sign_property", check_sign_property, store10m)
    record("analytic.identity_consistency", check_identity_consistency, store1m)
    record("analytic.closed_form_anchors", check_closed_form_anchors)
    record("analytic.corrected_bounds", check_corrected_bounds, store1m)
    record("analytic.literal_bound_violation", check_literal_bound_violation, out)
    record("analytic.tolerance_honesty", check_tolerance_honesty)
    record("analytic.term_decay", check_term_decay)

    ok = all(results)
    out.write(f"selftest: {sum(results)}/{len(results)} checks passed\n")
    return ok

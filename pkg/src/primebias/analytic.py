"""L-values at integer points and the bias constant L_chi.

The central quantity is L_chi = sum over primes of chi(p)/p, evaluated
through the Moebius identity

    L_chi = sum_{m >= 1} mu(m)/m * log L(m, chi^m),

where chi^m is chi itself for odd m and the principal character mod d for
even m. L(1, chi) comes from a digamma expansion, L(m, chi) for odd
m >= 3 from direct summation with an explicit tail bound, and the
principal values from zeta(m) times a finite Euler product. E(chi) is
L_chi - log L(1, chi); its classical all-prime bounds are reproduced both
by prime sums and by closed forms in the Mertens and Euler constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .characters import QuadraticCharacter
from .errors import ComputationError, UsageError
from .sieve import ClassifiedPrimeCounts, PrimeStore, build_primes, classified_counts

EULER_GAMMA = 0.5772156649015329
MERTENS = 0.26149721284764278

_MAX_MOBIUS_TERMS = 64
_MAX_SERIES_TERMS = 200_000_000


def loglog(x: float) -> float:
    """Natural log applied twice; needs x > e."""
    return math.log(math.log(x))


def _mobius(m: int) -> int:
    if m == 1:
        return 1
    out = 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            out = -out
        d += 1
    if m > 1:
        out = -out
    return out


# --- special functions ----------------------------------------------------


def digamma(x: float) -> float:
    """psi(x) for x > 0 by upward recurrence into the asymptotic series."""
    if x <= 0:
        raise UsageError(f"digamma needs x > 0, got {x}")
    acc = 0.0
    while x < 12.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # Bernoulli tail: 1/12 z^-2 - 1/120 z^-4 + 1/252 z^-6 - 1/240 z^-8 + ...
    tail = inv2 * (
        1 / 12.0
        - inv2
        * (1 / 120.0 - inv2 * (1 / 252.0 - inv2 * (1 / 240.0 - inv2 * (1 / 132.0 - inv2 * (691.0 / 32760.0)))))
    )
    return acc + math.log(x) - 0.5 * inv - tail


def zeta(m: int) -> float:
    """zeta(m) for integer m >= 2: direct sum to 10^4 plus the integral and
    two Euler-Maclaurin corrections."""
    if m < 2:
        raise UsageError(f"zeta(m) implemented for m >= 2, got {m}")
    N = 10_000
    n = np.arange(1, N + 1, dtype=np.float64)
    s = math.fsum(n ** (-float(m)))
    fN = float(N) ** (-m)
    return s + N ** (1 - m) / (m - 1) - fN / 2.0 + m * fN / (12.0 * N)


# --- Dirichlet L at integer points -----------------------------------------


def dirichlet_L(m: int, chi: QuadraticCharacter, tol: float = 1e-12) -> float:
    """L(m, chi) = sum chi(n)/n^m by direct summation.

    Truncates at N with the Abel-summation tail bound 2d/N^m <= tol.
    """
    if m < 2:
        raise UsageError(f"dirichlet_L needs m >= 2, got {m}")
    if tol < 1e-14:
        raise UsageError(f"tolerance below 1e-14 is not supported, got {tol}")
    d = chi.conductor
    N = int(math.ceil((2.0 * d / tol) ** (1.0 / m))) + 1
    if N > _MAX_SERIES_TERMS:
        raise ComputationError(
            f"dirichlet_L(m={m}) would need {N} terms for tol={tol}; cap is {_MAX_SERIES_TERMS}"
        )
    total = 0.0
    comp = 0.0  # Neumaier carry over chunk sums
    chunk = 4_000_000
    table = chi._table.astype(np.float64)
    for lo in range(1, N + 1, chunk):
        hi = min(lo + chunk, N + 1)
        n = np.arange(lo, hi, dtype=np.float64)
        vals = table[np.arange(lo, hi) % d]
        part = float(np.sum(vals * n ** (-float(m))))
        t = total + part
        if abs(total) >= abs(part):
            comp += (total - t) + part
        else:
            comp += (part - t) + total
        total = t
    return total + comp


def principal_L(m: int, d: int) -> float:
    """L(m, chi_0 mod d) = zeta(m) * prod over p | d of (1 - p^-m)."""
    if m < 2:
        raise UsageError(f"principal_L needs m >= 2, got {m}")
    out = zeta(m)
    dd = d
    p = 2
    while p * p <= dd:
        if dd % p == 0:
            out *= 1.0 - float(p) ** (-m)
            while dd % p == 0:
                dd //= p
        p += 1 if p == 2 else 2
    if dd > 1:
        out *= 1.0 - float(dd) ** (-m)
    return out


def L_at_one(chi: QuadraticCharacter, tol: float = 1e-12) -> float:
    """L(1, chi) = -(1/d) * sum_{a=1}^{d-1} chi(a) psi(a/d).

    The character sum over a full period vanishes, which cancels the pole
    of psi at 0; accuracy is limited by the digamma series (~1e-13).
    """
    if tol < 1e-13:
        raise UsageError(f"tolerance below 1e-13 is not supported, got {tol}")
    d = chi.conductor
    terms = [chi.eval(a) * digamma(a / d) for a in range(1, d) if chi.eval(a) != 0]
    return -math.fsum(terms) / d


# --- the bias constant ------------------------------------------------------


@dataclass(frozen=True)
class LchiEstimate:
    """L_chi with an honest truncation bound and the split log L1 + E."""

    character: QuadraticCharacter
    value: float
    truncation_bound: float
    L1: float
    E: float
    terms_used: int
    terms: tuple = ()  # (m, mu(m)/m * log L(m, chi^m)) for each retained m


def lchi(chi: QuadraticCharacter, tol: float = 1e-9) -> LchiEstimate:
    """L_chi via the Moebius identity over squarefree m.

    Each retained log L(m, .) term is bounded by a geometric envelope, so
    the series is cut once the envelope tail drops below tol/2; the other
    tol/2 is budgeted across the individual L evaluations.
    """
    if tol < 1e-12:
        raise UsageError(f"lchi tolerance below 1e-12 is not supported, got {tol}")
    d = chi.conductor
    n_ram = len(chi.ramified_primes())
    env = 4.0 + 2.0 * n_ram  # |log L(m,.)| <= env * 2^-m for m >= 3

    M = 3
    while (env / (M + 1)) * 2.0 ** (-M) > tol / 2.0:
        M += 1
        if M > _MAX_MOBIUS_TERMS:
            raise ComputationError(f"lchi cannot reach tol={tol} within {_MAX_MOBIUS_TERMS} terms")
    tail_bound = (env / (M + 1)) * 2.0 ** (-M)

    tol_term = tol / 16.0
    total = 0.0
    err_budget = tail_bound
    terms = []
    L1 = L_at_one(chi)
    for m in range(1, M + 1):
        mu = _mobius(m)
        if mu == 0:
            continue
        if m == 1:
            L = L1
            l_err = 5e-13 * d  # digamma-series error, one term per residue
        elif m % 2 == 0:
            L = principal_L(m, d)
            l_err = 1e-14
        else:
            L = dirichlet_L(m, chi, tol_term)
            l_err = tol_term
        term = (mu / m) * math.log(L)
        total += term
        err_budget += (1.0 / m) * (l_err / max(L, 0.2))
        terms.append((m, term))

    value = total
    return LchiEstimate(
        character=chi,
        value=value,
        truncation_bound=err_budget,
        L1=L1,
        E=value - math.log(L1),
        terms_used=len(terms),
        terms=tuple(terms),
    )


_LCHI_CACHE: dict[tuple[int, float], LchiEstimate] = {}


def lchi_cached(chi: QuadraticCharacter, tol: float = 1e-9) -> LchiEstimate:
    key = (chi.discriminant, tol)
    if key not in _LCHI_CACHE:
        _LCHI_CACHE[key] = lchi(chi, tol)
    return _LCHI_CACHE[key]


def lchi_direct(
    chi: QuadraticCharacter,
    X: int,
    *,
    counts: Optional[ClassifiedPrimeCounts] = None,
) -> float:
    """Partial sum over primes p <= X of chi(p)/p by sieve traversal.

    Converges like a character sum over primes, i.e. very slowly; this is
    a sanity cross-check for lchi, not a way to compute L_chi.
    """
    counts = _counts_for(chi, X, counts)
    primes = counts.store.primes
    primes = primes[primes <= X]
    vals = chi.eval_array(primes)
    s_plus = kernels.inv_sum(primes[vals == 1])
    s_minus = kernels.inv_sum(primes[vals == -1])
    return s_plus - s_minus


def e_prime_sum(
    chi: QuadraticCharacter,
    X: int = 10**6,
    *,
    counts: Optional[ClassifiedPrimeCounts] = None,
) -> float:
    """E(chi) = sum over p of log(1 - chi(p)/p) + chi(p)/p, accumulated
    prime by prime to X with a quadratic-tail estimate.

    Independent of the Moebius route in lchi; ramified primes contribute 0.
    """
    counts = _counts_for(chi, X, counts)
    primes = counts.store.primes
    primes = primes[primes <= X]
    vals = chi.eval_array(primes)
    inv = np.zeros(len(primes), dtype=np.float64)
    nz = vals != 0
    inv[nz] = vals[nz] / primes[nz].astype(np.float64)
    body = math.fsum(np.log1p(-inv) + inv)
    return body + _quadratic_prime_tail(X)


def _quadratic_prime_tail(X: int) -> float:
    # sum_{p > X} -1/(2 p^2), primes approximated with density 1/log t
    return -0.5 / (X * math.log(X))


def _counts_for(chi, X, counts):
    if counts is None:
        return classified_counts(build_primes(X), chi)
    if counts.limit < X:
        raise UsageError(f"classified counts reach {counts.limit} < required {X}")
    return counts


def e_bound_constants(
    *,
    store: Optional[PrimeStore] = None,
    limit: int = 10**7,
) -> tuple[float, float]:
    """The all-prime constants bracketing E(chi):

        lower = sum_p log(1 - 1/p) + 1/p   (= Mertens - gamma)
        upper = sum_p log(1 + 1/p) - 1/p   (= gamma - Mertens - log zeta(2))

    Each is computed both as a prime sum with tail estimate and from the
    closed form; disagreement beyond 1e-5 raises ComputationError.
    """
    if store is None:
        store = build_primes(limit)
    p = store.primes[store.primes <= limit].astype(np.float64)
    inv = 1.0 / p
    X = int(limit)
    lower_sum = math.fsum(np.log1p(-inv) + inv) + _quadratic_prime_tail(X)
    upper_sum = math.fsum(np.log1p(inv) - inv) + _quadratic_prime_tail(X)

    lower_closed = MERTENS - EULER_GAMMA
    upper_closed = EULER_GAMMA - MERTENS - math.log(math.pi**2 / 6.0)

    if abs(lower_sum - lower_closed) > 1e-5 or abs(upper_sum - upper_closed) > 1e-5:
        raise ComputationError(
            "prime-sum and closed-form E-bound constants disagree beyond 1e-5: "
            f"lower {lower_sum} vs {lower_closed}, upper {upper_sum} vs {upper_closed}"
        )
    return lower_closed, upper_closed


def corrected_e_bounds(
    chi: QuadraticCharacter,
    *,
    store: Optional[PrimeStore] = None,
    limit: int = 10**6,
    _full_sums: Optional[tuple[float, float]] = None,
) -> tuple[float, float]:
    """Bounds on E(chi) with the ramified primes p | d removed.

    The printed all-prime constants are not bounds for an actual character:
    chi vanishes on p | d, so those (negative) terms must be dropped, which
    raises both bounds. Term-by-term, log(1-1/p)+1/p <= log(1-chi(p)/p)+chi(p)/p
    <= log(1+1/p)-1/p for every unramified p.
    """
    if _full_sums is None:
        if store is None:
            store = build_primes(limit)
        p = store.primes[store.primes <= limit].astype(np.float64)
        inv = 1.0 / p
        tail = _quadratic_prime_tail(int(limit))
        _full_sums = (
            math.fsum(np.log1p(-inv) + inv) + tail,
            math.fsum(np.log1p(inv) - inv) + tail,
        )
    lower, upper = _full_sums
    for q in chi.ramified_primes():
        lower -= math.log1p(-1.0 / q) + 1.0 / q
        upper -= math.log1p(1.0 / q) - 1.0 / q
    return lower, upper


# --- prediction formulas ----------------------------------------------------

PREDICTION_TAGS = ("semiprime", "s", "kfactor", "weighted", "mixed")


@dataclass(frozen=True)
class Prediction:
    """A leading-order predicted ratio; the o(1) corrections are dropped."""

    tag: str
    x: float
    params: dict = field(default_factory=dict)
    ratio: float = float("nan")


def predict(
    tag: str,
    x: float,
    *,
    eta: Optional[int] = None,
    k: Optional[int] = None,
    lchi_value: Optional[float] = None,
    c: Optional[float] = None,
) -> Prediction:
    """Predicted ratio for the tagged formula at x.

    semiprime: 1 + eta * L_chi / loglog x
    s:        1 + 1 / (3 (loglog x - 1))
    kfactor:  1 + eta * (k-1) * L_chi / loglog x
    weighted: 1 + 2 * L_chi / loglog x
    mixed:    1 + (k-1) * c / loglog x
    """
    if x < 16:
        raise UsageError(f"predictions need x >= 16 (loglog x > 1), got {x}")
    ll = loglog(x)
    if tag == "semiprime":
        _need(eta=eta, lchi_value=lchi_value)
        ratio = 1.0 + eta * lchi_value / ll
        params = {"eta": eta, "lchi": lchi_value}
    elif tag == "s":
        ratio = 1.0 + 1.0 / (3.0 * (ll - 1.0))
        params = {}
    elif tag == "kfactor":
        _need(eta=eta, k=k, lchi_value=lchi_value)
        ratio = 1.0 + eta * (k - 1) * lchi_value / ll
        params = {"eta": eta, "k": k, "lchi": lchi_value}
    elif tag == "weighted":
        _need(lchi_value=lchi_value)
        ratio = 1.0 + 2.0 * lchi_value / ll
        params = {"lchi": lchi_value}
    elif tag == "mixed":
        _need(k=k, c=c)
        ratio = 1.0 + (k - 1) * c / ll
        params = {"k": k, "c": c}
    else:
        raise UsageError(f"unknown prediction tag {tag!r}; expected one of {PREDICTION_TAGS}")
    return Prediction(tag=tag, x=x, params=params, ratio=ratio)


def _need(**kwargs):
    missing = [name for name, val in kwargs.items() if val is None]
    if missing:
        raise UsageError(f"missing parameters for prediction: {', '.join(missing)}")


def c_vec(specs, tol: float = 1e-9) -> float:
    """c(chi_vec, eta_vec) = (1/k) * sum_j eta_j * L_{chi_j}."""
    specs = list(specs)
    if not specs:
        raise UsageError("c_vec needs at least one (character, eta) pair")
    return math.fsum(eta * lchi_cached(chi, tol).value for chi, eta in specs) / len(specs)

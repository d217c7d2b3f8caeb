"""Quadratic Dirichlet characters via the Kronecker symbol.

A real primitive quadratic character is parametrized by a fundamental
discriminant D and evaluated as chi(n) = (D/n), the Kronecker symbol.
Its conductor is |D|; chi is completely multiplicative, periodic mod |D|,
and vanishes exactly on integers sharing a factor with the conductor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError

# (a/2) for a mod 8: 0 for even a, +1 for a = +-1 (mod 8), -1 for a = +-3 (mod 8)
_KRONECKER_MOD8 = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for all integers except (0, 0).

    Extends the Jacobi symbol by the standard rules for n = 0, n < 0 and
    the prime 2.
    """
    if a == 0 and n == 0:
        raise UsageError("kronecker symbol (0/0) is undefined")
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        t = (n & -n).bit_length() - 1  # multiplicity of 2 in n
        n >>= t
        if t % 2 == 1:
            result *= _KRONECKER_MOD8[a % 8]
    # now n is odd and positive: Jacobi symbol (a/n) by quadratic reciprocity
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _is_squarefree(m: int) -> bool:
    m = abs(m)
    if m == 0:
        return False
    if m % 4 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % (d * d) == 0:
            return False
        while m % d == 0:
            m //= d
        d += 2
    return True


def is_fundamental_discriminant(D: int) -> bool:
    """True for D = 1 (mod 4) squarefree, or D = 4m with m squarefree and
    m = 2 or 3 (mod 4). D = 1 (the trivial field) is excluded here because
    it carries the principal character."""
    if D == 0 or D == 1:
        return False
    if D % 4 == 1:
        return _is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _is_squarefree(m)
    return False


def _fundamental_failure(D: int) -> str:
    if D == 0:
        return "D = 0 is not a discriminant"
    if D == 1:
        return "D = 1 carries the principal character, which is not supported"
    r = D % 4
    if r in (2, 3):
        return f"D = {D} = {r} (mod 4); a fundamental discriminant is 0 or 1 (mod 4)"
    if r == 1:
        return f"D = {D} = 1 (mod 4) but is not squarefree"
    m = D // 4
    if m % 4 not in (2, 3):
        return f"D = {D} = 4*{m} with {m} = {m % 4} (mod 4); need 2 or 3 (mod 4)"
    return f"D = {D} = 4*{m} with {m} not squarefree"


@dataclass(frozen=True)
class QuadraticCharacter:
    """Real character chi(n) = (D/n) for a fundamental discriminant D."""

    discriminant: int
    conductor: int = field(init=False)
    _table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        D = self.discriminant
        if not is_fundamental_discriminant(D):
            raise UsageError(f"not a fundamental discriminant: {_fundamental_failure(D)}")
        d = abs(D)
        object.__setattr__(self, "conductor", d)
        table = np.array([kronecker(D, r) for r in range(d)], dtype=np.int8)
        object.__setattr__(self, "_table", table)

    def eval(self, n: int) -> int:
        """chi(n) for n >= 1."""
        if n < 1:
            raise UsageError(f"character evaluation needs n >= 1, got {n}")
        return int(self._table[n % self.conductor])

    def eval_array(self, n: np.ndarray) -> np.ndarray:
        """Vectorized chi over an integer array (entries >= 1)."""
        return self._table[np.asarray(n) % self.conductor]

    def ramified_primes(self) -> list[int]:
        """Primes dividing the conductor (where chi vanishes)."""
        d = self.conductor
        out = []
        p = 2
        while p * p <= d:
            if d % p == 0:
                out.append(p)
                while d % p == 0:
                    d //= p
            p += 1 if p == 2 else 2
        if d > 1:
            out.append(d)
        return out

    def __str__(self):
        return f"chi_{self.discriminant}"


def make_character(D: int) -> QuadraticCharacter:
    """Character with eval(n) = kronecker(D, n) and conductor |D|."""
    return QuadraticCharacter(D)


def classify(chi: QuadraticCharacter, n: int) -> int:
    """Class label of n under chi: +1, -1, or 0 (ramified)."""
    return chi.eval(n)


@dataclass(frozen=True)
class ResidueClassPredicate:
    """Accepts n with n = residue (mod modulus); residue must be reduced."""

    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise UsageError(f"modulus must be positive, got {self.modulus}")
        if math.gcd(self.residue, self.modulus) != 1:
            raise UsageError(
                f"residue {self.residue} is not coprime to modulus {self.modulus}"
            )
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def accepts(self, n: int) -> bool:
        return n % self.modulus == self.residue

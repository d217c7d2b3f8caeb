"""Prime-class bias toolkit.

Counts products of k primes up to x classified by quadratic-character
values of their factors, and predicts the observed biases from the
character constant L_chi = sum over primes of chi(p)/p.
"""

__version__ = "0.1.0"

from .characters import (
    QuadraticCharacter,
    ResidueClassPredicate,
    classify,
    kronecker,
    make_character,
)
from .errors import ComputationError, ResourceLimitError, UsageError
from .sieve import PrimeStore, ClassifiedPrimeCounts, build_primes, classified_counts

__all__ = [
    "QuadraticCharacter",
    "ResidueClassPredicate",
    "classify",
    "kronecker",
    "make_character",
    "ComputationError",
    "ResourceLimitError",
    "UsageError",
    "PrimeStore",
    "ClassifiedPrimeCounts",
    "build_primes",
    "classified_counts",
    "__version__",
]

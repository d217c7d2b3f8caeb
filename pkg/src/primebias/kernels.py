"""Kernel backend selection.

Prefers the compiled extension (_kernels) and falls back to the numpy
implementation (_kernels_py). Set PRIMEBIAS_PURE=1 to force the fallback,
e.g. for benchmarking one against the other.
"""

import os

if os.environ.get("PRIMEBIAS_PURE"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
sieve_segment = _impl.sieve_segment
count_tuples_leq = _impl.count_tuples_leq
inv_sum = _impl.inv_sum

"""Numba switch for the hot kernels.

Every accelerated kernel in the package is written twice: an ``@njit``
version and a pure-numpy version with identical results (up to rounding).
Set ``ENTANGLER_DISABLE_NUMBA=1`` to force the numpy path, e.g. on a
platform without numba or to rule the JIT out while debugging.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional speedup
    numba = None

_FLAG = os.environ.get("ENTANGLER_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` with numba when available, else return it untouched."""
    if numba is None:
        return func
    return numba.njit(cache=True, fastmath=False)(func)


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl

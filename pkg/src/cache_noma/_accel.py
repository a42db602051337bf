"""Backend selection for the hot kernels.

The simplex and the sum-rate bisection run either as numba-compiled loops or
as plain numpy code.  Set ``CACHE_NOMA_BACKEND=numpy`` to force the numpy
path (also used automatically when numba cannot be imported).
"""
import os

_requested = os.environ.get("CACHE_NOMA_BACKEND", "numba").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

if _requested not in ("numba", "numpy"):
    raise ValueError(f"CACHE_NOMA_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

USE_NUMBA = _requested == "numba" and _numba is not None
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` with numba on the numba backend, else return it unchanged."""
    if not USE_NUMBA:
        return func
    return _numba.njit(cache=True, nogil=True)(func)

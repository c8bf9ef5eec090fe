"""Backend switch for the hot kernels.

``LEVELRANK_BACKEND=numpy`` (or ``LEVELRANK_NO_NUMBA=1``) disables numba
compilation. Kernels then run as plain Python over numpy arrays, except the
few that have a vectorized numpy twin, which use that twin instead.
"""
import os
import warnings

_flag = os.environ.get("LEVELRANK_BACKEND", "").strip().lower()
_disabled = _flag == "numpy" or os.environ.get("LEVELRANK_NO_NUMBA", "") not in ("", "0")

if _disabled:
    numba = None
else:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        warnings.warn("numba not importable, falling back to the numpy backend", stacklevel=2)
        numba = None

USE_NUMBA = numba is not None
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` in nopython mode when numba is active; identity otherwise."""
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func

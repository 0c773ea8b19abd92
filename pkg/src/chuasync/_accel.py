"""Optional numba acceleration.

Hot kernels are written once in numpy-compatible style and compiled with
``numba.njit`` when available. Set ``CHUASYNC_DISABLE_NUMBA=1`` to run the
same kernels as plain numpy code (useful for debugging and benchmarking).
"""
import os

_DISABLED = os.environ.get("CHUASYNC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    _njit = None
    NUMBA_ENABLED = False


def jit(fn):
    """Compile ``fn`` with numba if enabled; always expose the python source as ``py_func``."""
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    fn.py_func = fn
    return fn


def backend():
    return "numba" if NUMBA_ENABLED else "numpy"

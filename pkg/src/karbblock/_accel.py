"""Numba switch for the hot kernels.

Set ``KARBBLOCK_DISABLE_NUMBA=1`` to run every kernel as plain Python/numpy.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DISABLED = os.environ.get("KARBBLOCK_DISABLE_NUMBA", "").strip() not in ("", "0")
USE_NUMBA = numba is not None and not DISABLED


def njit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def py_func(fn):
    """Return the interpreted body of a kernel, jitted or not."""
    return getattr(fn, "py_func", fn)

"""Numba switch for the hot kernels.

Set ``FAPARETO_DISABLE_NUMBA=1`` to force the pure-numpy kernels (handy on
platforms without numba, or to rule out JIT issues when debugging).
"""

import os

_DISABLED = os.environ.get("FAPARETO_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    import numba as _nb
except ImportError:  # pragma: no cover
    _nb = None

HAS_NUMBA = _nb is not None
USE_NUMBA = HAS_NUMBA and not _DISABLED

JIT_OPTIONS = {"nogil": True, "cache": True}


def njit(func):
    """Compile ``func`` with numba when available; otherwise return it as is."""
    if _nb is None:
        return func
    return _nb.njit(**JIT_OPTIONS)(func)

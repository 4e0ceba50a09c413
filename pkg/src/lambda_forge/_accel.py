"""Numba switch.

Set ``LAMBDA_FORGE_NO_NUMBA=1`` to run every kernel through its pure-numpy
path. The flag is read once, at import time.
"""
import os

_FLAG = os.environ.get("LAMBDA_FORGE_NO_NUMBA", "").strip().lower()
DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None

USE_NUMBA = (_nb is not None) and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, else an identity decorator."""
    bare = len(args) == 1 and callable(args[0])
    if _nb is None:
        return args[0] if bare else (lambda fn: fn)
    kwargs.setdefault("cache", True)
    return _nb.njit(*args, **kwargs)

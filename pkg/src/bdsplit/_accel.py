"""Numba switch.

Set ``BDSPLIT_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  The flag is
read once, at import time.
"""
import functools
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
NUMBA_DISABLED = os.environ.get("BDSPLIT_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED

if HAVE_NUMBA:
    jit = functools.partial(numba.njit, cache=True)
else:  # pragma: no cover
    def jit(fn=None, **kwargs):
        return fn if fn is not None else (lambda f: f)

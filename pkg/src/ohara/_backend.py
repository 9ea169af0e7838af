"""Selects the numba or pure-numpy implementation of the hot kernels.

Set ``OHARA_NUMBA=0`` before import to force the numpy path.
"""

import os

_requested = os.environ.get("OHARA_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = _requested and HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when numba is available, otherwise an identity decorator."""
    if HAVE_NUMBA:
        import numba
        return numba.njit(*args, cache=True, **kwargs)

    def wrap(fn):
        return fn
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrap

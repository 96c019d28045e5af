"""Backend switch for the compiled kernels.

Set ``LOQCSIM_NO_NUMBA=1`` to run every kernel through its pure-numpy
counterpart. Both paths consume identical random inputs, so results agree
to rounding.
"""
import os

_off = os.environ.get("LOQCSIM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

USE_NUMBA = False
if not _off:
    try:
        import numba as _numba
        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, otherwise a no-op decorator."""
    if USE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"

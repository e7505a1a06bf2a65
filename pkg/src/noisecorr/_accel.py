"""Backend selection for the numeric kernels.

Set ``NOISECORR_DISABLE_NUMBA=1`` to force the pure-numpy path even when
numba is importable.
"""
import os

_FLAG = os.environ.get("NOISECORR_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` in nopython mode when numba is present.

    The undecorated function is returned otherwise, so loop kernels still run
    (slowly) under plain CPython; callers normally pick the numpy variant
    instead in that case.
    """
    if HAS_NUMBA:
        return numba.njit(cache=True)(func)
    return func

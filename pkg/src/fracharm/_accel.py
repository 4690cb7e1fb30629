"""Backend switch for the hot kernels.

Set ``FRACHARM_BACKEND=numpy`` (or ``FRACHARM_DISABLE_NUMBA=1``) before import
to run the pure-numpy path.  Anything else uses numba when it imports cleanly.
"""
import os

_flag = os.environ.get("FRACHARM_BACKEND", "").strip().lower()
_disabled = _flag == "numpy" or os.environ.get("FRACHARM_DISABLE_NUMBA", "") not in ("", "0")

try:
    if _disabled:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,  # keep IEEE semantics, reductions must be reproducible
    "error_model": "numpy",
    "boundscheck": False,
}


def njit(func=None, **overrides):
    """``numba.njit`` with package defaults; identity when numba is off."""
    if not HAVE_NUMBA:
        if func is None:
            return lambda f: f
        return func
    opts = dict(numba_default, **overrides)
    if func is None:
        return lambda f: numba.njit(**opts)(f)
    return numba.njit(**opts)(func)


def set_threads(n):
    """Cap numba's thread pool; returns the count actually in effect."""
    if not HAVE_NUMBA:
        return 1
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old; workqueue is always available
        numba.config.THREADING_LAYER = "workqueue"
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n

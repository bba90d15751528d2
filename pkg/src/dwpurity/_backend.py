"""Backend selection for the hot kernels.

Set ``DWPURITY_NO_NUMBA=1`` to force the pure-numpy path. If numba cannot be
imported the numpy path is used regardless.
"""
import os

_DISABLED = os.environ.get("DWPURITY_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def backend_name():
    return "numba" if USE_NUMBA else "numpy"

"""Dispatch to the numba or numpy kernel implementation.

The backend is fixed at import time by ``dwpurity._backend``. Both
implementations stay importable so tests and the benchmark can compare them.
"""
import numpy as np

from . import _kernels_np
from ._backend import USE_NUMBA, backend_name
from .errors import NumericalError

if USE_NUMBA:
    from . import _kernels_jit as _impl
else:
    _impl = _kernels_np

__all__ = [
    "backend_name",
    "householder_tridiagonalize",
    "tridiagonal_ql",
    "top_eigenpairs",
]


def householder_tridiagonalize(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    return _impl.householder_tridiagonalize(a)


def tridiagonal_ql(d, e, z):
    """Eigenvalues of the tridiagonal (d, e); rotations accumulate into ``z``.

    Raises NumericalError when the per-eigenvalue sweep cap is exceeded.
    """
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    w, ok = _impl.tridiagonal_ql(d, e, z)
    if not ok:
        raise NumericalError(
            f"implicit QL did not converge within {_kernels_np.MAX_QL_ITER} sweeps per eigenvalue"
        )
    return w


def top_eigenpairs(d, e, rtol=1e-9):
    """Batched largest eigenpair of symmetric tridiagonal matrices.

    ``d``: (B, n) diagonals, ``e``: (B, n-1) off-diagonals. Raises
    NumericalError if any residual exceeds ``rtol * max(1, ||T||_1)``.
    """
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    if d.ndim != 2 or e.shape != (d.shape[0], d.shape[1] - 1):
        raise ValueError(f"bad batch shapes d={d.shape} e={e.shape}")
    if d.shape[1] == 1:
        e = np.zeros((d.shape[0], 0))
    lam, vec, res = _impl.top_eigenpairs(d, e)
    scale = np.abs(d).max(axis=1)
    if e.shape[1]:
        scale = scale + 2.0 * np.abs(e).max(axis=1)
    bad = res > rtol * np.maximum(1.0, scale)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NumericalError(
            f"inverse iteration residual {res[k]:.3e} too large for batch item {k}"
        )
    return lam, vec

"""Symmetric eigendecomposition and exact time evolution by spectral resolution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractError, NumericalError
from .model import ModelParams, build_hamiltonian
from .spin_algebra import QuantumState, SpinSpace


@dataclass(frozen=True, eq=False)
class SpectralDecomp:
    """Ascending eigenvalues; column k of ``eigenvectors`` pairs with eigenvalue k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def _sorted(w, z):
    order = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[order])
    z = np.ascontiguousarray(z[:, order])
    w.setflags(write=False)
    z.setflags(write=False)
    return SpectralDecomp(w, z)


def eig_tridiagonal(diag, off) -> SpectralDecomp:
    """Full decomposition of the symmetric tridiagonal matrix (diag, off) by implicit QL."""
    d = np.asarray(diag, dtype=np.float64)
    n = d.shape[0]
    if n < 1:
        raise ContractError("empty matrix")
    e = np.zeros(n)
    e[: n - 1] = np.asarray(off, dtype=np.float64)
    z = np.eye(n)
    w = kernels.tridiagonal_ql(d, e, z)
    return _sorted(w, z)


def eig_symmetric(a) -> SpectralDecomp:
    """Householder tridiagonalization followed by implicit QL.

    Deterministic; raises NumericalError if QL exceeds its sweep cap.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ContractError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ContractError("matrix is not exactly symmetric")
    d, e, q = kernels.householder_tridiagonalize(a)
    w = kernels.tridiagonal_ql(d, e, q)
    return _sorted(w, q)


def extremal_eigenpair(diag, off):
    """Largest eigenvalue and its unit eigenvector of a symmetric tridiagonal block.

    Sturm-sequence bisection for the eigenvalue, then inverse iteration. The
    eigenvector's largest-magnitude entry is positive.
    """
    d = np.atleast_1d(np.asarray(diag, dtype=np.float64))
    e = np.asarray(off, dtype=np.float64).reshape(-1)
    if e.shape[0] != d.shape[0] - 1:
        raise ContractError(f"off-diagonal length {e.shape[0]} does not fit diagonal length {d.shape[0]}")
    lam, vec = kernels.top_eigenpairs(d[None, :], e[None, :])
    return float(lam[0]), vec[0]


def evolve(decomp: SpectralDecomp, psi0: QuantumState, t: float, omega: float = 1.0) -> QuantumState:
    """psi(t) = sum_k exp(-i E_k t / Omega) <v_k|psi0> v_k, with t the dimensionless Omega t."""
    return QuantumState(psi0.space, _evolve_amplitudes(decomp, psi0, np.array([t]), omega)[0])


def _evolve_amplitudes(decomp, psi0, times, omega):
    if decomp.dim != psi0.space.dim:
        raise ContractError(f"decomposition has dimension {decomp.dim}, state {psi0.space.dim}")
    v = decomp.eigenvectors
    coeff = v.T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(times, decomp.eigenvalues / omega))
    return (phases * coeff) @ v.T


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Per-time generalized purity and Bloch components (normalized by J)."""

    times: np.ndarray
    gp: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    def rows(self):
        return zip(self.times, self.gp, self.jx, self.jy, self.jz)


def evolve_series(params: ModelParams, space: SpinSpace, psi0: QuantumState, t_grid,
                  chunk: int = 2048) -> TimeSeries:
    from .observables import bloch_components

    times = np.asarray(t_grid, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ContractError("t_grid must be a non-empty 1-D sequence")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ContractError("t_grid must start at 0 and be strictly increasing")
    if psi0.space != space:
        raise ContractError("initial state belongs to a different spin space")
    decomp = eig_symmetric(build_hamiltonian(params, space))
    comps = []
    for lo in range(0, times.size, chunk):
        amps = _evolve_amplitudes(decomp, psi0, times[lo:lo + chunk], params.omega)
        norms = np.einsum("ti,ti->t", amps.conj(), amps).real
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise NumericalError(f"evolution lost unitarity (max |norm-1| = {np.abs(norms - 1).max():.2e})")
        comps.append(bloch_components(amps, space))
    b = np.concatenate(comps, axis=0)
    gp = np.sum(b * b, axis=1)
    return TimeSeries(times, gp, b[:, 0], b[:, 1], b[:, 2])

"""Two-mode double-well Hamiltonian as a spin-J operator.

    H = Omega' J_z + 2 (kappa - eta) J_x^2 + 4 eta J_z^2
    Omega' = 2 [2 Lambda (N - 1) + Omega / 2],  eta = kappa eps^2,  Lambda = kappa eps^(3/2)

H only couples m to m and m +/- 2, so it splits into two symmetric
tridiagonal blocks on the even and odd basis indices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ValidationError
from .spin_algebra import SpinSpace


@dataclass(frozen=True)
class ModelParams:
    omega: float
    kappa: float
    epsilon: float
    n_particles: int

    @property
    def eta(self) -> float:
        return self.kappa * self.epsilon ** 2

    @property
    def lam(self) -> float:
        """Cross-collision Lambda (``lambda`` is reserved)."""
        return self.kappa * self.epsilon ** 1.5

    @property
    def omega_eff(self) -> float:
        return 2.0 * (2.0 * self.lam * (self.n_particles - 1) + 0.5 * self.omega)

    def as_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "omega": self.omega,
            "kappa": self.kappa,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "lambda": self.lam,
            "omega_eff": self.omega_eff,
        }


def _finite(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"not a number: {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, f"must be finite, got {value!r}")
    return value


def derive_params(omega, kappa, epsilon, n_particles) -> ModelParams:
    omega = _finite("omega", omega)
    kappa = _finite("kappa", kappa)
    epsilon = _finite("epsilon", epsilon)
    if omega <= 0:
        raise ValidationError("omega", f"must be > 0, got {omega}")
    if kappa < 0:
        raise ValidationError("kappa", f"must be >= 0, got {kappa}")
    if not 0 <= epsilon < 1:
        raise ValidationError("epsilon", f"must lie in [0, 1), got {epsilon}")
    if isinstance(n_particles, bool) or int(n_particles) != n_particles or n_particles < 1:
        raise ValidationError("n_particles", f"must be a positive integer, got {n_particles!r}")
    return ModelParams(omega, kappa, epsilon, int(n_particles))


def params_from_eta(omega, kappa, eta, n_particles) -> ModelParams:
    """Parameters fixed through eta instead of the overlap: eps = sqrt(eta / kappa).

    Lambda follows from the same eps, so a nonzero eta also shifts Omega'.
    """
    kappa = _finite("kappa", kappa)
    eta = _finite("eta", eta)
    if eta < 0:
        raise ValidationError("eta", f"must be >= 0, got {eta}")
    if eta == 0:
        return derive_params(omega, kappa, 0.0, n_particles)
    if kappa <= 0:
        raise ValidationError("eta", "nonzero eta requires kappa > 0")
    if eta >= kappa:
        raise ValidationError("eta", f"eta={eta} >= kappa={kappa} would need epsilon >= 1")
    return derive_params(omega, kappa, math.sqrt(eta / kappa), n_particles)


def _check_space(params: ModelParams, space: SpinSpace):
    if space.n_particles != params.n_particles:
        raise ContractError(
            f"space has N={space.n_particles} but params have N={params.n_particles}"
        )


def hamiltonian_bands(params: ModelParams, space: SpinSpace):
    """Diagonal and the m <-> m+2 band of H, each as a 1-D array. O(N)."""
    _check_space(params, space)
    j = space.j
    m = space.m_values
    cas = j * (j + 1.0)
    eta = params.eta
    diag = params.omega_eff * m + 4.0 * eta * m * m + (params.kappa - eta) * (cas - m * m)
    mm = m[:-2]
    off2 = 0.5 * (params.kappa - eta) * np.sqrt(
        (cas - mm * (mm + 1.0)) * (cas - (mm + 1.0) * (mm + 2.0))
    )
    return diag, off2


def build_hamiltonian(params: ModelParams, space: SpinSpace) -> np.ndarray:
    diag, off2 = hamiltonian_bands(params, space)
    dim = space.dim
    h = np.zeros((dim, dim))
    idx = np.arange(dim)
    h[idx, idx] = diag
    h[idx[:-2], idx[2:]] = off2
    h[idx[2:], idx[:-2]] = h[idx[:-2], idx[2:]]
    return h


@dataclass(frozen=True, eq=False)
class ParityBlocks:
    """Even/odd index blocks of a Delta-index in {0, +-2} matrix, stored tridiagonally."""

    dim: int
    even_diag: np.ndarray
    even_off: np.ndarray
    odd_diag: np.ndarray
    odd_off: np.ndarray

    @property
    def even_index(self) -> np.ndarray:
        return np.arange(0, self.dim, 2)

    @property
    def odd_index(self) -> np.ndarray:
        return np.arange(1, self.dim, 2)

    def blocks(self):
        """((diag, off, indices), ...) for the non-empty blocks, even first."""
        out = [(self.even_diag, self.even_off, self.even_index)]
        if self.odd_diag.size:
            out.append((self.odd_diag, self.odd_off, self.odd_index))
        return tuple(out)

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim))
        for d, e, idx in self.blocks():
            h[idx, idx] = d
            h[idx[:-1], idx[1:]] = e
            h[idx[1:], idx[:-1]] = e
        return h

    def embed(self, vector: np.ndarray, parity: int) -> np.ndarray:
        """Place a block vector back into the full basis (zeros elsewhere)."""
        idx = self.even_index if parity == 0 else self.odd_index
        out = np.zeros(self.dim, dtype=np.asarray(vector).dtype)
        out[idx] = vector
        return out


def parity_partition(h: np.ndarray) -> ParityBlocks:
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {h.shape}")
    dim = h.shape[0]
    i, k = np.indices(h.shape)
    band = (i == k) | (np.abs(i - k) == 2)
    if np.any(h[~band] != 0):
        raise ContractError("matrix has entries outside the Delta-index in {0, +-2} band")
    d = np.diag(h).copy()
    off = np.diag(h, 2).copy()
    return ParityBlocks(dim, d[0::2], off[0::2], d[1::2], off[1::2])


def parity_blocks_from_params(params: ModelParams, space: SpinSpace) -> ParityBlocks:
    """Parity blocks straight from the bands, without a dense matrix."""
    diag, off2 = hamiltonian_bands(params, space)
    return ParityBlocks(space.dim, diag[0::2], off2[0::2], diag[1::2], off2[1::2])

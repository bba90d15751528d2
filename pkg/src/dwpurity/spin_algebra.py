"""Spin-J operators in the |J, m> basis, SU(2) coherent states and rotations.

Basis ordering is ascending in m: index ``i = m + J``, so index 0 is the
lowest-weight state |J, -J>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContractError, NumericalError, ValidationError

NORM_TOL = 1e-12


@dataclass(frozen=True)
class SpinSpace:
    """Irreducible spin-J representation for N bosons, J = N/2."""

    n_particles: int

    def __post_init__(self):
        n = self.n_particles
        if isinstance(n, bool) or int(n) != n or n < 0:
            raise ValidationError("n_particles", f"must be a non-negative integer, got {n!r}")
        object.__setattr__(self, "n_particles", int(n))

    @property
    def j(self) -> float:
        return self.n_particles / 2.0

    @property
    def dim(self) -> int:
        return self.n_particles + 1

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.dim) - self.j

    def index(self, m: float) -> int:
        i = m + self.j
        if i != int(i) or not 0 <= i < self.dim:
            raise ValidationError("m", f"{m} is not a weight of J={self.j}")
        return int(i)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized pure state; ``amplitudes[i]`` multiplies |J, m = i - J>."""

    space: SpinSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.space.dim,):
            raise ContractError(f"expected {self.space.dim} amplitudes, got shape {amps.shape}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValidationError("amplitudes", f"state not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, space: SpinSpace, amplitudes) -> "QuantumState":
        """Build a state from arbitrary nonzero amplitudes, normalizing them."""
        amps = np.asarray(amplitudes, dtype=np.complex128)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValidationError("amplitudes", "zero vector cannot be normalized")
        return cls(space, amps / nrm)

    @classmethod
    def basis(cls, space: SpinSpace, m: float) -> "QuantumState":
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[space.index(m)] = 1.0
        return cls(space, amps)

    def overlap(self, other: "QuantumState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "QuantumState") -> float:
        return abs(self.overlap(other)) ** 2


def _ladder_coefficients(space: SpinSpace) -> np.ndarray:
    # <m+1|J_+|m> for m = -J .. J-1
    j = space.j
    m = space.m_values[:-1]
    return np.sqrt(j * (j + 1.0) - m * (m + 1.0))


@dataclass(frozen=True, eq=False)
class SpinOperators:
    """Dense J_x, J_y, J_z for one SpinSpace.

    Build once per space with :func:`build_spin_operators` and pass it along;
    the J_x eigendecomposition used for rotations is computed on first use.
    """

    space: SpinSpace
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    ladder: np.ndarray = field(repr=False)

    @cached_property
    def jx_eigen(self):
        from .spectral import eig_tridiagonal

        dim = self.space.dim
        return eig_tridiagonal(np.zeros(dim), 0.5 * self.ladder)

    def rotation_matrix(self, theta: float, phi: float) -> np.ndarray:
        """Unitary R(theta, phi) = exp(-i theta (J_x sin phi - J_y cos phi)).

        The generator equals theta * D J_x D^dagger with D = exp(-i (phi - pi/2) J_z),
        so only the real symmetric J_x needs diagonalizing.
        """
        if theta == 0.0:
            return np.eye(self.space.dim, dtype=np.complex128)
        dec = self.jx_eigen
        v = dec.eigenvectors
        phase = np.exp(-1j * (phi - 0.5 * np.pi) * self.space.m_values)
        core = (v * np.exp(-1j * theta * dec.eigenvalues)) @ v.T
        return phase[:, None] * core * phase.conj()[None, :]


def build_spin_operators(space: SpinSpace) -> SpinOperators:
    """J_x (real symmetric), J_y (purely imaginary Hermitian), J_z (diagonal)."""
    c = _ladder_coefficients(space)
    jplus = np.diag(c, -1)
    jx = 0.5 * (jplus + jplus.T)
    jy = -0.5j * (jplus - jplus.T)
    jz = np.diag(space.m_values).astype(np.float64)
    for a in (jx, jy, jz):
        a.setflags(write=False)
    return SpinOperators(space, jx, jy, jz, c)


def normalize_angles(theta: float, phi: float) -> tuple[float, float]:
    """Map (theta, phi) onto theta in [0, pi], phi in [0, 2 pi), same point on the sphere."""
    theta = math.fmod(float(theta), 2.0 * math.pi)
    if theta < 0:
        theta += 2.0 * math.pi
    phi = float(phi)
    if theta > math.pi:
        theta = 2.0 * math.pi - theta
        phi += math.pi
    phi = math.fmod(phi, 2.0 * math.pi)
    if phi < 0:
        phi += 2.0 * math.pi
    if phi >= 2.0 * math.pi:
        phi = 0.0
    return theta, phi


def rotate_state(state: QuantumState, theta: float, phi: float,
                 ops: SpinOperators | None = None) -> QuantumState:
    """Apply R(theta, phi) to ``state``.

    Angles are used as given (no reduction), so ``theta = -t`` inverts ``theta = t``.
    """
    ops = ops if ops is not None else build_spin_operators(state.space)
    if ops.space != state.space:
        raise ContractError("operators and state belong to different spin spaces")
    out = ops.rotation_matrix(theta, phi) @ state.amplitudes
    nrm = np.linalg.norm(out)
    if abs(nrm - 1.0) > NORM_TOL:
        raise NumericalError(f"rotation lost unitarity: |psi| = {nrm!r}")
    return QuantumState(state.space, out / nrm)


def coherent_state(space: SpinSpace, theta: float, phi: float,
                   ops: SpinOperators | None = None) -> QuantumState:
    """|theta, phi> = R(theta, phi) |J, -J>.

    The Bloch vector points along (sin t cos p, sin t sin p, -cos t).
    """
    theta, phi = normalize_angles(theta, phi)
    lowest = QuantumState.basis(space, -space.j)
    return rotate_state(lowest, theta, phi, ops)


def coherent_amplitudes(space: SpinSpace, theta, phi) -> np.ndarray:
    """Closed-form coherent-state amplitudes, up to a global phase.

    c_m = sqrt(C(2J, J+m)) cos(t/2)^(J-m) sin(t/2)^(J+m) exp(-i m phi).
    ``theta`` and ``phi`` broadcast against each other; the basis index is
    appended as the last axis. Valid for theta in [0, pi].
    """
    theta = np.asarray(theta, dtype=np.float64)[..., None]
    phi = np.asarray(phi, dtype=np.float64)[..., None]
    n = space.n_particles
    k = np.arange(n + 1)  # k = J + m
    log_binom = (math.lgamma(n + 1) - np.array([math.lgamma(i + 1) + math.lgamma(n - i + 1) for i in k]))
    half = 0.5 * theta
    c, s = np.abs(np.cos(half)), np.abs(np.sin(half))
    # 0 * log(0) -> 0 so the pole states come out exactly
    with np.errstate(divide="ignore", invalid="ignore"):
        lc, ls = np.log(c), np.log(s)
        log_mod = (0.5 * log_binom + np.where(n - k == 0, 0.0, (n - k) * lc)
                   + np.where(k == 0, 0.0, k * ls))
    modulus = np.exp(log_mod)
    m = k - 0.5 * n
    return modulus * np.exp(-1j * m * phi)


def expectation(op: np.ndarray, state: QuantumState) -> float:
    """<psi|A|psi> for Hermitian ``op``; raises if the imaginary residue is not negligible."""
    op = np.asarray(op)
    dim = state.space.dim
    if op.shape != (dim, dim):
        raise ContractError(f"operator shape {op.shape} does not match dimension {dim}")
    psi = state.amplitudes
    val = np.vdot(psi, op @ psi)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericalError(f"expectation has imaginary part {val.imag!r}; operator not Hermitian?")
    return float(val.real)

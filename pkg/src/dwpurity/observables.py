"""Generalized purity, Bloch vector and Husimi Q-function on the sphere."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ValidationError
from .spin_algebra import QuantumState, SpinSpace, _ladder_coefficients, coherent_amplitudes


def bloch_components(amplitudes, space: SpinSpace) -> np.ndarray:
    """(<J_x>, <J_y>, <J_z>) / J for a batch of amplitude rows, shape (..., 3).

    Uses the ladder structure directly: <J_+> = sum_m c_m conj(psi_{m+1}) psi_m.
    """
    if space.n_particles == 0:
        raise ValidationError("n_particles", "Bloch vector undefined for J = 0")
    psi = np.asarray(amplitudes)
    if psi.shape[-1] != space.dim:
        raise ContractError(f"amplitude length {psi.shape[-1]} does not match dimension {space.dim}")
    c = _ladder_coefficients(space)
    jplus = np.sum(c * psi[..., 1:].conj() * psi[..., :-1], axis=-1)
    jz = np.sum(space.m_values * (psi.conj() * psi).real, axis=-1)
    out = np.stack([jplus.real, jplus.imag, jz], axis=-1)
    return out / space.j


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def angles(self) -> tuple[float, float]:
        """(theta, phi) in the coherent-state convention z = -cos(theta)."""
        r = math.sqrt(self.norm2)
        if r == 0:
            return 0.0, 0.0
        theta = math.acos(max(-1.0, min(1.0, -self.z / r)))
        phi = math.atan2(self.y, self.x) % (2.0 * math.pi)
        return theta, phi


def bloch_vector(state: QuantumState) -> BlochVector:
    x, y, z = bloch_components(state.amplitudes, state.space)
    return BlochVector(float(x), float(y), float(z))


def generalized_purity(state: QuantumState) -> float:
    """(1/J^2) sum_k <J_k>^2; 1 exactly on coherent states."""
    return bloch_vector(state).norm2


@dataclass(frozen=True)
class SphereGrid:
    """Cell-centered in theta (no pole nodes), uniform in phi."""

    n_theta: int = 128
    n_phi: int = 256

    def __post_init__(self):
        if self.n_theta < 2:
            raise ValidationError("grid_theta", f"need at least 2 rows, got {self.n_theta}")
        if self.n_phi < 3:
            raise ValidationError("grid_phi", f"need at least 3 columns, got {self.n_phi}")

    @property
    def thetas(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * math.pi / self.n_theta

    @property
    def phis(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def theta_weights(self) -> np.ndarray:
        """Fejer (first rule) weights in cos(theta) on the cell-centred nodes.

        They carry the sin(theta) Jacobian, sum to exactly 2, and integrate
        polynomials in cos(theta) of degree < n_theta exactly.
        """
        n = self.n_theta
        k = np.arange(1, n // 2 + 1)
        terms = np.cos(2.0 * np.outer(self.thetas, k)) / (4.0 * k * k - 1.0)
        return (2.0 / n) * (1.0 - 2.0 * terms.sum(axis=1))

    @property
    def weights(self) -> np.ndarray:
        """Solid-angle weights per node, shape (n_theta, n_phi); they sum to 4 pi."""
        w = self.theta_weights * (2.0 * math.pi / self.n_phi)
        return np.repeat(w[:, None], self.n_phi, axis=1)


@dataclass(frozen=True, eq=False)
class QField:
    grid: SphereGrid
    values: np.ndarray  # (n_theta, n_phi)
    j: float

    def normalization(self) -> float:
        """((2J+1) / 4 pi) times the quadrature of Q; 1 for any normalized state."""
        return (2.0 * self.j + 1.0) / (4.0 * math.pi) * float(np.sum(self.values * self.grid.weights))


def husimi_q(state: QuantumState, grid: SphereGrid | None = None) -> QField:
    """Q(theta, phi) = |<theta, phi|psi>|^2 on every grid node.

    For fixed theta the overlap is a sum over m of a_m(theta) psi_m exp(i m phi),
    so the whole field is two small matrix products.
    """
    grid = grid if grid is not None else SphereGrid()
    space = state.space
    moduli = coherent_amplitudes(space, grid.thetas, 0.0).real  # (n_theta, dim)
    phase = np.exp(1j * np.outer(space.m_values, grid.phis))  # (dim, n_phi)
    overlap = (moduli * state.amplitudes) @ phase
    q = (overlap.conj() * overlap).real
    return QField(grid, q, space.j)


def angular_separation(a, b) -> float:
    """Great-circle angle between two (theta, phi) points, radians."""
    (t1, p1), (t2, p2) = a, b
    c = math.cos(t1) * math.cos(t2) + math.sin(t1) * math.sin(t2) * math.cos(p1 - p2)
    return math.acos(max(-1.0, min(1.0, c)))


def count_local_maxima(field: QField, floor: float = 0.2, merge_cells: int = 2, rtol: float = 1e-12):
    """Local maxima of Q above ``floor`` times its global maximum.

    A node qualifies if it is >= its 8 neighbors (phi wraps, theta edge rows
    use what exists). Candidates closer than ``merge_cells`` grid cells on the
    sphere (great-circle distance, so nodes facing each other across a pole
    count as close) are merged transitively and represented by their highest
    node. Returns ``(count, [(theta, phi), ...])`` sorted by descending Q.
    """
    if not 0 < floor < 1:
        raise ValidationError("floor", f"must lie in (0, 1), got {floor}")
    q = field.values
    nt, nph = q.shape
    gmax = float(q.max())
    slack = rtol * gmax
    padded = np.full((nt + 2, nph), -np.inf)
    padded[1:-1] = q
    is_max = q >= floor * gmax
    for dt in (-1, 0, 1):
        for dp in (-1, 0, 1):
            if dt == 0 and dp == 0:
                continue
            nb = np.roll(padded, -dp, axis=1)[1 + dt: nt + 1 + dt]
            is_max &= q >= nb - slack
    cand = [tuple(x) for x in np.argwhere(is_max)]

    # transitive merge (small candidate counts; quadratic is fine)
    parent = list(range(len(cand)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    th, ph = field.grid.thetas, field.grid.phis
    radius = merge_cells * max(math.pi / nt, 2.0 * math.pi / nph) * (1.0 + 1e-9)
    pts = [(th[a], ph[b]) for a, b in cand]
    for a in range(len(cand)):
        for b in range(a + 1, len(cand)):
            if angular_separation(pts[a], pts[b]) <= radius:
                parent[find(a)] = find(b)
    best = {}
    for i, (a, b) in enumerate(cand):
        r = find(i)
        if r not in best or q[a, b] > q[best[r]]:
            best[r] = (a, b)
    peaks = sorted(best.values(), key=lambda ab: (-q[ab], ab))
    return len(peaks), [(float(th[a]), float(ph[b])) for a, b in peaks]

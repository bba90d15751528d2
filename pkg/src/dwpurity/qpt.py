"""Purity of the highest-energy eigenstate across the bifurcation at kappa N / Omega = 1/2.

The sweep variable is x = kappa N / Omega. For each x the top eigenpair of
both parity blocks is found by bisection plus inverse iteration, the larger
one is kept, and since a definite-parity state has <J_x> = <J_y> = 0 its
purity is (<J_z>/J)^2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ContractError, CriticalRangeError, ValidationError
from .model import ModelParams, derive_params, parity_blocks_from_params
from .spin_algebra import QuantumState, SpinSpace

DEGENERACY_RTOL = 1e-12
DEFAULT_LADDER = (100, 200, 300, 400, 600, 800, 1000)


class DegeneracyWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class TopEigenstate:
    energy: float
    state: QuantumState
    parity: int
    degenerate: bool


def highest_energy_state(params: ModelParams, space: SpinSpace) -> TopEigenstate:
    """Top eigenpair of H, taken from whichever parity block holds it.

    When the two block maxima agree to within 1e-12 of ||H|| the even-block
    state is returned, ``degenerate`` is set and a DegeneracyWarning issued.
    """
    blocks = parity_blocks_from_params(params, space)
    found = []
    for parity, (d, e, _) in enumerate(blocks.blocks()):
        lam, vec = kernels.top_eigenpairs(d[None, :], e[None, :])
        found.append((float(lam[0]), vec[0], parity))
    energy, vec, parity = found[0]
    degenerate = False
    if len(found) == 2:
        scale = max(1.0, _norm_bound(blocks))
        gap = found[1][0] - found[0][0]
        if abs(gap) < DEGENERACY_RTOL * scale:
            degenerate = True
            warnings.warn(f"top parity doublet split by {gap:.3e}; returning the even state",
                          DegeneracyWarning, stacklevel=2)
        elif gap > 0:
            energy, vec, parity = found[1]
    amps = blocks.embed(vec, parity)
    return TopEigenstate(energy, QuantumState(space, amps.astype(np.complex128)), parity, degenerate)


def _norm_bound(blocks):
    out = 0.0
    for d, e, _ in blocks.blocks():
        r = np.abs(d).copy()
        r[:-1] += np.abs(e)
        r[1:] += np.abs(e)
        out = max(out, float(r.max()))
    return out


def uniform_grid(x_min: float, x_max: float, step: float) -> np.ndarray:
    """x_min + step * k, k = 0..K, with the last node at or just below x_max."""
    if step <= 0:
        raise ValidationError("x_step", f"must be > 0, got {step}")
    if x_max <= x_min:
        raise ValidationError("x_max", f"must exceed x_min={x_min}, got {x_max}")
    count = int(math.floor((x_max - x_min) / step + 1e-9)) + 1
    if count < 3:
        raise ValidationError("x_step", "grid needs at least 3 nodes")
    return x_min + step * np.arange(count)


@dataclass(frozen=True, eq=False)
class SweepResult:
    n_particles: int
    omega: float
    epsilon: float
    x_grid: np.ndarray
    gp: np.ndarray
    dgp_dx: np.ndarray
    degenerate: np.ndarray = field(repr=False)

    @property
    def step(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])


def _check_uniform(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 3:
        raise ContractError("x_grid needs at least 3 nodes")
    dx = np.diff(x)
    if np.any(dx <= 0) or np.max(np.abs(dx - dx[0])) > 1e-9 * max(1.0, abs(dx[0])):
        raise ContractError("x_grid must be uniform and increasing")
    return x


def top_state_purity(n_particles: int, kappas, omega: float = 1.0, epsilon: float = 0.0):
    """Purity of the top eigenstate for every kappa in ``kappas``, batched.

    Returns ``(gp, energy, degenerate)`` arrays.
    """
    kappas = np.asarray(kappas, dtype=np.float64)
    space = SpinSpace(n_particles)
    base = derive_params(omega, 0.0, epsilon, n_particles)
    j = space.j
    m = space.m_values
    cas = j * (j + 1.0)
    # bands are linear in kappa once epsilon is fixed
    k = kappas[:, None]
    eta = k * epsilon ** 2
    lam = k * epsilon ** 1.5
    omega_eff = 2.0 * (2.0 * lam * (n_particles - 1) + 0.5 * base.omega)
    diag = omega_eff * m + 4.0 * eta * m * m + (k - eta) * (cas - m * m)
    mm = m[:-2]
    off2 = 0.5 * (k - eta) * np.sqrt((cas - mm * (mm + 1.0)) * (cas - (mm + 1.0) * (mm + 2.0)))

    results = []
    for parity in (0, 1):
        d = np.ascontiguousarray(diag[:, parity::2])
        if d.shape[1] == 0:
            continue
        e = np.ascontiguousarray(off2[:, parity::2])
        lam_top, vec = kernels.top_eigenpairs(d, e)
        jz = np.sum(vec * vec * m[parity::2], axis=1) / j
        results.append((lam_top, jz, np.abs(d).max(axis=1) + 2 * (np.abs(e).max(axis=1) if e.shape[1] else 0)))
    best_e, best_jz, scale = results[0]
    degenerate = np.zeros(kappas.shape, dtype=bool)
    if len(results) == 2:
        lam_o, jz_o, scale_o = results[1]
        gap = lam_o - best_e
        tol = DEGENERACY_RTOL * np.maximum(1.0, np.maximum(scale, scale_o))
        degenerate = np.abs(gap) < tol
        take_odd = (gap > 0) & ~degenerate
        best_e = np.where(take_odd, lam_o, best_e)
        best_jz = np.where(take_odd, jz_o, best_jz)
    return best_jz * best_jz, best_e, degenerate


def gp_vs_x(n_particles: int, x_grid, omega: float = 1.0, epsilon: float = 0.0) -> SweepResult:
    """Top-state purity on a uniform grid of x = kappa N / Omega, plus dGP/dx.

    Central differences inside, one-sided at the two ends.
    """
    x = _check_uniform(x_grid)
    if x[0] < 0:
        raise ValidationError("x_min", "x must be non-negative")
    gp, _, degenerate = top_state_purity(n_particles, x * omega / n_particles, omega, epsilon)
    dgp = np.gradient(gp, x[1] - x[0])
    return SweepResult(n_particles, omega, epsilon, x, gp, dgp, degenerate)


@dataclass(frozen=True)
class CriticalPoint:
    n_particles: int
    x_star: float
    omega: float = 1.0

    @property
    def kappa_c_q(self) -> float:
        return self.x_star * self.omega / self.n_particles

    @property
    def delta(self) -> float:
        return self.kappa_c_q - self.omega / (2.0 * self.n_particles)


def find_critical(sweep: SweepResult) -> CriticalPoint:
    """Location of the minimum of dGP/dx, refined by the parabola through the
    lowest node and its two neighbours."""
    dg = sweep.dgp_dx
    i = int(np.argmin(dg))
    if i == 0 or i == dg.size - 1:
        raise CriticalRangeError(
            f"dGP/dx minimum for N={sweep.n_particles} sits on the sweep boundary "
            f"x={sweep.x_grid[i]:.6g}; widen the x range"
        )
    a, b, c = dg[i - 1], dg[i], dg[i + 1]
    curv = a - 2.0 * b + c
    shift = 0.5 * (a - c) / curv if curv > 0 else 0.0
    x_star = float(sweep.x_grid[i] + shift * sweep.step)
    return CriticalPoint(sweep.n_particles, x_star, sweep.omega)


def curve_crossings(x, y1, y2, window=None):
    """Abscissas where y1 - y2 changes sign, linearly interpolated."""
    x = np.asarray(x)
    diff = np.asarray(y1) - np.asarray(y2)
    out = []
    for i in range(diff.size - 1):
        a, b = diff[i], diff[i + 1]
        if a == 0:
            xc = x[i]
        elif a * b < 0:
            xc = x[i] + (x[i + 1] - x[i]) * a / (a - b)
        else:
            continue
        if window is None or window[0] <= xc <= window[1]:
            out.append(float(xc))
    if diff[-1] == 0 and (window is None or window[0] <= x[-1] <= window[1]):
        out.append(float(x[-1]))
    return out


@dataclass(frozen=True)
class PowerLawFit:
    """ln y = prefactor_log + exponent * ln N, y = N (kappa_c^q - kappa_c) / Omega."""

    exponent: float
    prefactor_log: float
    stderr_exponent: float
    stderr_prefactor: float
    residual_rms: float
    n_points: int

    @property
    def full_exponent(self) -> float:
        """Exponent of kappa_c^q - kappa_c itself."""
        return self.exponent - 1.0


def power_law_fit(points) -> PowerLawFit:
    points = list(points)
    if len(points) < 4:
        raise ValidationError("n_ladder", f"need at least 4 critical points, got {len(points)}")
    ns = np.array([p.n_particles for p in points], dtype=np.float64)
    if np.unique(ns).size != ns.size:
        raise ValidationError("n_ladder", "particle numbers must be distinct")
    y = np.array([p.n_particles * p.delta / p.omega for p in points])
    if np.any(y <= 0):
        bad = [p.n_particles for p in points if p.delta <= 0]
        raise ValidationError("delta", f"non-positive kappa_c^q - kappa_c for N={bad}; log undefined")
    lx, ly = np.log(ns), np.log(y)
    n = lx.size
    xm, ym = lx.mean(), ly.mean()
    sxx = np.sum((lx - xm) ** 2)
    slope = np.sum((lx - xm) * (ly - ym)) / sxx
    intercept = ym - slope * xm
    resid = ly - (intercept + slope * lx)
    s2 = np.sum(resid ** 2) / (n - 2)
    se_slope = math.sqrt(s2 / sxx)
    se_int = math.sqrt(s2 * (1.0 / n + xm ** 2 / sxx))
    rms = math.sqrt(float(np.mean(resid ** 2)))
    return PowerLawFit(float(slope), float(intercept), se_slope, se_int, rms, n)


def critical_ladder(n_ladder=DEFAULT_LADDER, x_grid=None, omega: float = 1.0, epsilon: float = 0.0):
    """Sweep each N, locate its critical point. Returns (sweeps, points)."""
    if x_grid is None:
        x_grid = uniform_grid(0.0, 2.0, 0.002)
    sweeps = [gp_vs_x(n, x_grid, omega, epsilon) for n in n_ladder]
    return sweeps, [find_critical(s) for s in sweeps]


def planted_points(n_ladder=DEFAULT_LADDER, exponent=-0.657, prefactor_log=0.31, omega=1.0):
    """Synthetic critical points lying exactly on a chosen power law."""
    out = []
    for n in n_ladder:
        y = math.exp(prefactor_log) * n ** exponent
        out.append(CriticalPoint(int(n), 0.5 + y, omega))
    return out

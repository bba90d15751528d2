import math
import warnings

import numpy as np
import pytest

from dwpurity.errors import ContractError, CriticalRangeError, ValidationError
from dwpurity.model import build_hamiltonian, derive_params
from dwpurity.observables import generalized_purity
from dwpurity.qpt import (
    CriticalPoint,
    DegeneracyWarning,
    SweepResult,
    curve_crossings,
    find_critical,
    gp_vs_x,
    highest_energy_state,
    planted_points,
    power_law_fit,
    top_state_purity,
    uniform_grid,
)
from dwpurity.spin_algebra import QuantumState, SpinSpace

from _oracles import dense_top


def test_top_state_without_collisions():
    sp = SpinSpace(100)
    top = highest_energy_state(derive_params(1.0, 0.0, 0.0, 100), sp)
    assert top.energy == pytest.approx(50.0, abs=1e-12)
    assert abs(top.state.amplitudes[-1]) == pytest.approx(1.0, abs=1e-14)
    assert generalized_purity(top.state) == pytest.approx(1.0, abs=1e-12)
    assert not top.degenerate


@pytest.mark.parametrize("n", [1, 2, 7, 60, 101, 400])
@pytest.mark.parametrize("x", [0.0, 0.3, 0.5, 0.62, 1.0])
def test_top_state_against_dense(n, x):
    sp = SpinSpace(n)
    p = derive_params(1.0, x / n, 0.2, n)
    h = build_hamiltonian(p, sp)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneracyWarning)
        top = highest_energy_state(p, sp)
    e_ref, v_ref, w = dense_top(h)
    assert abs(top.energy - e_ref) < 1e-9 * max(1.0, abs(e_ref))
    if w[-1] - w[-2] > 1e-6:
        gp_ref = generalized_purity(QuantumState(sp, v_ref.astype(complex)))
        assert abs(generalized_purity(top.state) - gp_ref) < 1e-9
    amps = top.state.amplitudes.real
    assert amps[np.argmax(np.abs(amps))] > 0
    assert np.all(top.state.amplitudes.imag == 0)


def test_degenerate_doublet_flagged():
    # deep in the bifurcated regime the top doublet is split below round-off
    sp = SpinSpace(200)
    with pytest.warns(DegeneracyWarning):
        top = highest_energy_state(derive_params(1.0, 2.0 / 200, 0.0, 200), sp)
    assert top.degenerate and top.parity == 0


def test_batched_purity_matches_single():
    n = 80
    xs = np.linspace(0, 1.5, 31)
    gp, energy, _ = top_state_purity(n, xs / n)
    for k in (0, 7, 15, 30):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegeneracyWarning)
            top = highest_energy_state(derive_params(1.0, xs[k] / n, 0.0, n), SpinSpace(n))
        assert gp[k] == pytest.approx(generalized_purity(top.state), abs=1e-12)
        assert energy[k] == pytest.approx(top.energy, abs=1e-12)


def test_uniform_grid():
    x = uniform_grid(0.0, 2.0, 0.002)
    assert x.size == 1001 and x[-1] == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        uniform_grid(0, 1, 0)
    with pytest.raises(ValidationError):
        uniform_grid(1, 0, 0.1)


def test_sweep_basics():
    s = gp_vs_x(100, uniform_grid(0.0, 1.0, 0.01))
    assert abs(s.gp[0] - 1) < 1e-9
    assert np.all((s.gp >= 0) & (s.gp <= 1 + 1e-12))
    np.testing.assert_allclose(s.dgp_dx, np.gradient(s.gp, 0.01))
    with pytest.raises(ContractError):
        gp_vs_x(100, [0.0, 0.1, 0.3])


def test_sweep_nearly_n_independent_below_transition():
    x = uniform_grid(0.0, 0.3, 0.01)
    a = gp_vs_x(100, x).gp
    b = gp_vs_x(1000, x).gp
    assert np.abs(a - b).max() < 0.02


def test_steepening_with_n():
    x = uniform_grid(0.0, 1.0, 0.002)
    slopes = [find_critical(gp_vs_x(n, x)) for n in (100, 200, 400)]
    minima = [gp_vs_x(n, x).dgp_dx.min() for n in (100, 200, 400)]
    assert minima[0] > minima[1] > minima[2]
    assert slopes[0].x_star > slopes[1].x_star > slopes[2].x_star > 0.5


def test_scale_invariance():
    x = uniform_grid(0.0, 1.0, 0.005)
    a = gp_vs_x(150, x, omega=1.0, epsilon=0.1)
    b = gp_vs_x(150, x, omega=7.3, epsilon=0.1)
    assert np.abs(a.gp - b.gp).max() < 1e-10
    assert abs(find_critical(a).x_star - find_critical(b).x_star) < 1e-10


def _synthetic_sweep(center, step=0.01):
    # gp = 1 - 0.5 (1 + tanh((x - c)/w)), derivative minimum exactly at c
    x = uniform_grid(0.0, 1.5, step)
    w = 0.05
    gp = 1 - 0.5 * (1 + np.tanh((x - center) / w))
    return SweepResult(100, 1.0, 0.0, x, gp, np.gradient(gp, step), np.zeros(x.size, bool))


@pytest.mark.parametrize("center", [0.61, 0.6137, 0.9])
def test_find_critical_synthetic(center):
    s = _synthetic_sweep(center)
    cp = find_critical(s)
    assert abs(cp.x_star - center) < s.step
    assert cp.kappa_c_q == pytest.approx(cp.x_star / 100)
    assert cp.delta == pytest.approx((cp.x_star - 0.5) / 100)


def test_find_critical_boundary():
    with pytest.raises(CriticalRangeError):
        find_critical(_synthetic_sweep(1.7))
    with pytest.raises(CriticalRangeError):
        find_critical(_synthetic_sweep(-0.2))


def test_refinement_stable_under_half_step():
    coarse = find_critical(gp_vs_x(200, uniform_grid(0.3, 0.9, 0.004)))
    fine = find_critical(gp_vs_x(200, uniform_grid(0.3, 0.9, 0.002)))
    assert abs(coarse.x_star - fine.x_star) < 0.004


def test_curve_crossings():
    x = np.linspace(0, 1, 11)
    assert curve_crossings(x, x, 0.55 * np.ones(11)) == pytest.approx([0.55])
    assert curve_crossings(x, x, 0.5 * np.ones(11)) == pytest.approx([0.5])
    assert curve_crossings(x, x, 2 + x) == []
    assert curve_crossings(x, np.sin(8 * x), 0 * x, window=(0.1, 0.5)) == pytest.approx([math.pi / 8], abs=0.02)


def test_power_law_exact_recovery():
    pts = [CriticalPoint(n, 0.5 + 2.0 * n ** -0.5) for n in range(100, 1001, 100)]
    fit = power_law_fit(pts)
    assert fit.exponent == pytest.approx(-0.5, abs=1e-12)
    assert fit.prefactor_log == pytest.approx(math.log(2.0), abs=1e-12)
    assert fit.residual_rms < 1e-12 and fit.stderr_exponent < 1e-10
    assert fit.full_exponent == pytest.approx(-1.5, abs=1e-12)


def test_power_law_stderr_against_hand_formula():
    ns = np.array([100, 200, 400, 800, 1600.0])
    noise = np.array([0.01, -0.02, 0.015, -0.005, 0.0])
    y = np.exp(0.3 - 0.65 * np.log(ns) + noise)
    fit = power_law_fit([CriticalPoint(int(n), 0.5 + v) for n, v in zip(ns, y)])
    a = np.vstack([np.ones(5), np.log(ns)]).T
    coef, res, *_ = np.linalg.lstsq(a, np.log(y), rcond=None)
    cov = res[0] / 3 * np.linalg.inv(a.T @ a)
    assert fit.exponent == pytest.approx(coef[1], abs=1e-12)
    assert fit.prefactor_log == pytest.approx(coef[0], abs=1e-12)
    assert fit.stderr_exponent == pytest.approx(math.sqrt(cov[1, 1]), rel=1e-9)
    assert fit.stderr_prefactor == pytest.approx(math.sqrt(cov[0, 0]), rel=1e-9)


def test_power_law_domain_errors():
    good = planted_points((100, 200, 300, 400))
    with pytest.raises(ValidationError):
        power_law_fit(good[:3])
    with pytest.raises(ValidationError):
        power_law_fit(good[:3] + [CriticalPoint(500, 0.49)])
    with pytest.raises(ValidationError):
        power_law_fit(good + [good[0]])


def test_order_independence():
    x = uniform_grid(0.0, 1.0, 0.01)
    fw = [gp_vs_x(n, x).gp for n in (60, 90, 120)]
    bw = [gp_vs_x(n, x).gp for n in (120, 90, 60)][::-1]
    for a, b in zip(fw, bw):
        assert np.array_equal(a, b)

import math

import numpy as np
import pytest

from dwpurity.errors import ContractError
from dwpurity.model import build_hamiltonian, derive_params, params_from_eta, parity_partition
from dwpurity.observables import bloch_vector, generalized_purity
from dwpurity.spectral import (
    eig_symmetric,
    eig_tridiagonal,
    evolve,
    evolve_series,
    extremal_eigenpair,
)
from dwpurity.spin_algebra import QuantumState, SpinSpace, build_spin_operators, coherent_state

from _oracles import dense_top, schrodinger_dop853


def _check_decomp(a, dec, tol=1e-10):
    a = np.asarray(a)
    v, w = dec.eigenvectors, dec.eigenvalues
    scale = max(1.0, np.linalg.norm(a))
    assert np.all(np.diff(w) >= 0)
    assert np.abs(v.T @ v - np.eye(len(w))).max() <= tol
    assert np.linalg.norm(a @ v - v * w, axis=0).max() <= tol * scale


def test_diagonal_input():
    dec = eig_symmetric(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(dec.eigenvalues, [1, 2, 3])
    np.testing.assert_array_equal(np.abs(dec.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_two_by_two():
    dec = eig_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(dec.eigenvalues, [-1, 1], atol=1e-15)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(np.abs(dec.eigenvectors), [[s, s], [s, s]], atol=1e-15)
    assert dec.eigenvectors[0, 0] * dec.eigenvectors[1, 0] < 0


@pytest.mark.parametrize("n", [1, 2, 3, 17, 50, 120])
def test_random_symmetric(n, rng):
    a = rng.normal(size=(n, n))
    a = a + a.T
    dec = eig_symmetric(a)
    _check_decomp(a, dec)
    assert abs(dec.eigenvalues.sum() - np.trace(a)) < 1e-9
    assert abs(np.sum(dec.eigenvalues ** 2) - np.sum(a * a)) < 1e-8 * np.sum(a * a)
    np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10 * max(1, np.abs(a).max() * n))


def test_deterministic(rng):
    a = rng.normal(size=(40, 40))
    a = a + a.T
    d1, d2 = eig_symmetric(a), eig_symmetric(a)
    assert np.array_equal(d1.eigenvalues, d2.eigenvalues)
    assert np.array_equal(d1.eigenvectors, d2.eigenvectors)


def test_degenerate_spectrum():
    a = np.kron(np.eye(3), np.array([[2.0, 1.0], [1.0, 2.0]]))
    dec = eig_symmetric(a)
    np.testing.assert_allclose(dec.eigenvalues, [1, 1, 1, 3, 3, 3], atol=1e-14)
    _check_decomp(a, dec)


def test_rejects_asymmetric():
    with pytest.raises(ContractError):
        eig_symmetric(np.array([[1.0, 2.0], [2.0000001, 1.0]]))
    with pytest.raises(ContractError):
        eig_symmetric(np.ones((2, 3)))


def test_tridiagonal_decomposition(rng):
    d, e = rng.normal(size=60), rng.normal(size=59)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    _check_decomp(t, eig_tridiagonal(d, e))


def test_hamiltonian_decomposition():
    sp = SpinSpace(100)
    h = build_hamiltonian(params_from_eta(1.0, 0.02, 0.002, 100), sp)
    dec = eig_symmetric(h)
    _check_decomp(h, dec)
    assert abs(dec.eigenvalues.sum() - np.trace(h)) < 1e-9


def test_extremal_examples():
    lam, v = extremal_eigenpair([2.0], [])
    assert lam == 2.0 and v.tolist() == [1.0]
    lam, v = extremal_eigenpair([-0.5, 1.5], [0.5])
    assert lam == pytest.approx(0.5 + math.sqrt(1.25), abs=1e-12)
    assert abs(np.linalg.norm(v) - 1) < 1e-14


@pytest.mark.parametrize("kappa", [0.0, 0.001, 0.004, 0.01, 0.03])
def test_extremal_block_dim_500(kappa):
    # N = 999 gives parity blocks of size 500
    sp = SpinSpace(999)
    b = parity_partition(build_hamiltonian(derive_params(1.0, kappa, 0.0, 999), sp))
    for d, e, _ in b.blocks():
        lam, v = extremal_eigenpair(d, e)
        t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        top, ref, w = dense_top(t)
        scale = max(1.0, np.abs(t).sum(axis=1).max())
        assert abs(lam - top) <= 1e-10 * scale
        assert np.linalg.norm(t @ v - lam * v) <= 1e-9 * scale
        if w[-1] - w[-2] > 1e-8:
            assert abs(v @ ref) >= 1 - 1e-8
        dec = eig_tridiagonal(d, e)
        assert abs(dec.eigenvalues[-1] - lam) < 1e-9 * scale


def test_extremal_negative_offdiagonals(rng):
    d, e = rng.normal(size=80), -np.abs(rng.normal(size=79))
    lam, v = extremal_eigenpair(d, e)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    top, ref, _ = dense_top(t)
    assert abs(lam - top) < 1e-12 * max(1, abs(top))
    assert abs(abs(v @ ref) - 1) < 1e-10
    assert v[np.argmax(np.abs(v))] > 0


def test_evolve_zero_time_and_norm(rng):
    sp = SpinSpace(40)
    h = build_hamiltonian(derive_params(1.0, 0.05, 0.3, 40), sp)
    dec = eig_symmetric(h)
    psi = coherent_state(sp, 1.0, 2.0)
    assert np.abs(evolve(dec, psi, 0.0).amplitudes - psi.amplitudes).max() < 1e-13
    e0 = np.vdot(psi.amplitudes, h @ psi.amplitudes).real
    for t in (0.3, 7.0, 123.4):
        out = evolve(dec, psi, t)
        assert abs(np.vdot(out.amplitudes, out.amplitudes).real - 1) < 1e-12
        assert abs(np.vdot(out.amplitudes, h @ out.amplitudes).real - e0) < 1e-10 * max(1, abs(e0))


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, math.pi])
def test_larmor_precession(t):
    sp = SpinSpace(20)
    dec = eig_symmetric(build_hamiltonian(derive_params(1.0, 0.0, 0.0, 20), sp))
    out = evolve(dec, coherent_state(sp, math.pi / 2, 0.0), t)
    assert abs(bloch_vector(out).x - math.cos(t)) < 1e-9


def test_evolve_time_in_units_of_omega():
    sp = SpinSpace(10)
    p = derive_params(2.5, 0.0, 0.0, 10)
    dec = eig_symmetric(build_hamiltonian(p, sp))
    out = evolve(dec, coherent_state(sp, math.pi / 2, 0.0), 1.0, omega=p.omega)
    assert abs(bloch_vector(out).x - math.cos(1.0)) < 1e-9


def test_evolve_vs_integrator_mst():
    n = 100
    sp = SpinSpace(n)
    p = params_from_eta(1.0, 2.0 / n, 0.02 / n, n)
    h = build_hamiltonian(p, sp)
    psi0 = coherent_state(sp, math.pi / 2, 0.0)
    ref = schrodinger_dop853(h, psi0.amplitudes, 5.0)
    out = evolve(eig_symmetric(h), psi0, 5.0, p.omega)
    assert np.abs(out.amplitudes - ref).max() < 1e-6


def test_dimension_mismatch():
    dec = eig_symmetric(np.eye(3))
    with pytest.raises(ContractError):
        evolve(dec, QuantumState.basis(SpinSpace(3), 0.5), 1.0)


def test_evolve_series_invariants():
    n = 30
    sp = SpinSpace(n)
    p = params_from_eta(1.0, 2.0 / n, 0.2 / n, n)
    ts = evolve_series(p, sp, coherent_state(sp, math.pi / 2, 0.0), np.arange(0, 50.0, 0.1))
    assert abs(ts.gp[0] - 1) < 1e-10
    assert np.all(ts.gp <= 1 + 1e-9) and np.all(ts.gp >= 0)
    np.testing.assert_allclose(ts.gp, ts.jx ** 2 + ts.jy ** 2 + ts.jz ** 2)
    # components agree with dense operator expectations at a sample time
    ops = build_spin_operators(sp)
    dec = eig_symmetric(build_hamiltonian(p, sp))
    psi = evolve(dec, coherent_state(sp, math.pi / 2, 0.0), ts.times[137])
    for comp, op in ((ts.jx, ops.jx), (ts.jy, ops.jy), (ts.jz, ops.jz)):
        assert abs(comp[137] - np.vdot(psi.amplitudes, op @ psi.amplitudes).real / sp.j) < 1e-10


def test_evolve_series_grid_checks():
    sp = SpinSpace(4)
    p = derive_params(1.0, 0.1, 0.0, 4)
    psi = coherent_state(sp, 0.3, 0.0)
    with pytest.raises(ContractError):
        evolve_series(p, sp, psi, [0.1, 0.2])
    with pytest.raises(ContractError):
        evolve_series(p, sp, psi, [0.0, 0.2, 0.2])


def test_eigenstates_have_no_transverse_components():
    n = 24
    sp = SpinSpace(n)
    ops = build_spin_operators(sp)
    dec = eig_symmetric(build_hamiltonian(derive_params(1.0, 0.08, 0.3, n), sp))
    b = parity_partition(build_hamiltonian(derive_params(1.0, 0.08, 0.3, n), sp))
    for parity, (d, e, idx) in enumerate(b.blocks()):
        bdec = eig_tridiagonal(d, e)
        for k in range(d.size):
            psi = QuantumState(sp, b.embed(bdec.eigenvectors[:, k], parity).astype(complex))
            bv = bloch_vector(psi)
            assert abs(bv.x) < 1e-10 and abs(bv.y) < 1e-15
            three_term = sum(np.vdot(psi.amplitudes, op @ psi.amplitudes).real ** 2
                             for op in (ops.jx, ops.jy, ops.jz)) / sp.j ** 2
            assert abs(generalized_purity(psi) - (bv.z ** 2)) < 1e-12
            assert abs(three_term - bv.z ** 2) < 1e-12
    # dense eigenvectors of a real symmetric H: <J_y> vanishes identically
    for k in range(0, sp.dim, 5):
        psi = QuantumState(sp, dec.eigenvectors[:, k].astype(complex))
        assert bloch_vector(psi).y == 0.0

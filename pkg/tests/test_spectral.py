import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermal_link.core import SystemParams
from thermal_link.spectral import (GROUND, MIRROR, SpectralError, build_hamiltonian, eigensystem,
                                   jacobi_eigh, solve)

OMEGA_A = 4.0e6


def test_decoupled_hamiltonian_is_diagonal():
    p = SystemParams(g1=0, g2=0, nu=0)
    H = build_hamiltonian(p)
    np.testing.assert_array_equal(H, np.diag([p.omega_a, p.omega_0, p.omega_a, p.omega_0, p.omega_a, 0]))


def test_paper_hamiltonian_structure(resonant):
    H = build_hamiltonian(resonant)
    np.testing.assert_array_equal(np.diag(H, 1)[:4], [5, 5, 5, 5])
    assert np.all(H[GROUND] == 0) and np.all(H[:, GROUND] == 0)
    assert H[0, 5] == 0
    np.testing.assert_array_equal(H, H.T)


def test_path_graph_eigenvalues(resonant):
    # uniform 5-site chain: eigenvalues 2 g cos(k pi / 6)
    dressed = solve(resonant)
    expected = OMEGA_A + 2 * 5.0 * np.cos(np.arange(1, 6) * math.pi / 6)
    np.testing.assert_allclose(dressed.omega[:5], expected, rtol=1e-15)
    np.testing.assert_allclose(dressed.relative, 5 * np.array([math.sqrt(3), 1, 0, -1, -math.sqrt(3)]),
                               atol=1e-12)
    assert dressed.omega[5] == 0.0


@pytest.mark.parametrize("g, nu", [(5.0, 5.0), (2.0, 7.0), (10.0, 1.0)])
def test_dark_state(g, nu):
    p = SystemParams(delta=0.0, g1=g, g2=g, nu=nu)
    dressed = solve(p)
    k = int(np.argmin(np.abs(dressed.omega - p.omega_a)))
    v = np.array([nu, 0, -g, 0, nu, 0]) / math.sqrt(2 * nu ** 2 + g ** 2)
    col = dressed.C[:, k]
    assert abs(abs(col @ v) - 1) < 1e-12
    assert abs(col[1]) < 1e-12 and abs(col[3]) < 1e-12


@pytest.mark.parametrize("delta", [0.0, 1e-4 * OMEGA_A, 0.1 * OMEGA_A, -0.05 * OMEGA_A])
def test_eigensystem_invariants(delta):
    p = SystemParams(delta=delta, g1=5, g2=3, nu=7)
    H = build_hamiltonian(p)
    d = eigensystem(H)
    C = d.C
    np.testing.assert_allclose(C.T @ C, np.eye(6), atol=1e-12)
    assert np.abs(C @ np.diag(d.omega) @ C.T - H).max() <= 1e-10 * np.abs(H).max()
    resid = np.abs(H @ C - C * d.omega).max()
    assert resid <= 1e-9 * np.abs(H).max()
    np.testing.assert_allclose((C ** 2).sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_array_equal(C[GROUND], np.eye(6)[GROUND])
    np.testing.assert_array_equal(C[:, GROUND], np.eye(6)[GROUND])
    assert np.all(np.diff(d.omega) < 0)


def test_sign_convention():
    d = solve(SystemParams(g1=3, g2=4, nu=2))
    for k in range(6):
        col = d.C[:, k]
        assert col[np.argmax(np.abs(col))] > 0


def test_matches_lapack(resonant):
    H = build_hamiltonian(SystemParams(delta=0.03 * OMEGA_A, g1=4, g2=6, nu=3))
    d = eigensystem(H)
    np.testing.assert_allclose(np.sort(d.omega), np.linalg.eigvalsh(H), rtol=1e-14)


def test_jacobi_random_symmetric():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(5, 5))
    A = A + A.T
    w, V = jacobi_eigh(A)
    np.testing.assert_allclose(A @ V, V * w, atol=1e-12)
    np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-12)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(SpectralError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 20), st.floats(-0.2, 0.2), st.floats(0.1, 20))
def test_mirror_symmetry(g, delta_frac, nu):
    p = SystemParams(delta=delta_frac * OMEGA_A, g1=g, g2=g, nu=nu)
    d = solve(p)
    # only nondegenerate levels have a definite parity
    gaps = np.abs(np.subtract.outer(d.relative, d.relative)) + np.eye(5) * 1e9
    for k in range(5):
        if gaps[k].min() < 1e-6:
            continue
        v = d.C[:, k]
        assert min(np.abs(v - v[MIRROR]).max(), np.abs(v + v[MIRROR]).max()) < 1e-10


def test_long_lived_level_against_high_precision(paper):
    # reference from 60-digit arithmetic
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 60
    H = build_hamiltonian(paper)
    E, Q = mp.eigsy(mp.matrix(H.tolist()))
    d = solve(paper)
    order = sorted(range(6), key=lambda i: -E[i])
    for n in range(3):
        i = order[n]
        exact_weight = float(Q[1, i] ** 2)
        assert d.C[1, n] ** 2 == pytest.approx(exact_weight, rel=1e-6, abs=1e-30)
        assert float(E[i]) == pytest.approx(d.omega[n], rel=1e-15)


def test_degeneracy_warning():
    d = solve(SystemParams(g1=0.0, g2=0.0, nu=0.0, delta=0.0))
    assert d.warnings
    # exact ties resolved by overlap with bare |1>, |2>, ...
    np.testing.assert_array_equal(np.abs(d.C), np.eye(6))


def test_ground_must_be_decoupled():
    H = build_hamiltonian(SystemParams())
    H[0, 5] = H[5, 0] = 1.0
    with pytest.raises(SpectralError):
        eigensystem(H)

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from thermal_link.core import SystemParams
from thermal_link.dynamics import DensityMatrix, propagate
from thermal_link.oracle import (DIM, OracleError, block_expm, build_generator, coupled_blocks,
                                 expm_propagate, gibbs_reference, pade13_expm, spectral_abscissa,
                                 steady_state, trace_functional, unvectorize, vectorize)

from conftest import model, random_density, random_params


def test_vectorize_round_trip():
    rho = random_density(np.random.default_rng(0))
    v = vectorize(rho)
    assert v.shape == (2 * DIM,) and v.dtype == float
    np.testing.assert_array_equal(unvectorize(v), rho)


def test_generator_matches_master_equation(paper):
    """Apply the generator and compare with the master equation written with matrices."""
    d, r = model(paper)
    gen = build_generator(d, r)
    rho = random_density(np.random.default_rng(1))
    level = np.append(d.relative, 0.0)
    level[5] = -d.shift
    H = np.diag(level)
    rhs = -1j * (H @ rho - rho @ H)
    for k in range(5):
        lower = np.zeros((6, 6))
        lower[5, k] = 1.0
        for rate, L in ((r.down[k], lower), (r.up[k], lower.T)):
            rhs += rate * (L @ rho @ L.T - 0.5 * (L.T @ L @ rho + rho @ L.T @ L))
    np.testing.assert_allclose(gen.apply(rho), rhs, atol=1e-12)


def test_unitary_generator_spectrum():
    p = SystemParams(omega_a=60.0, delta=6.0, gamma1=0.0, gamma2=0.0, gamma3=0.0)
    d, r = model(p)
    gen = build_generator(d, r)
    eig = np.linalg.eigvals(gen.matrix)
    assert np.abs(eig.real).max() < 1e-12
    full = np.append(d.omega[:5], 0.0)
    bohr = np.sort(np.abs(np.subtract.outer(full, full)).ravel())
    # each Bohr frequency appears as a +-i pair in the real split
    np.testing.assert_allclose(np.sort(np.abs(eig.imag)), np.sort(np.repeat(bohr, 2)), atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_trace_functional_annihilates(seed):
    rng = np.random.default_rng(seed)
    d, r = model(random_params(rng, temperatures="mixed"))
    gen = build_generator(d, r)
    f = trace_functional()
    assert np.abs(f @ gen.matrix).max() <= 1e-12
    for _ in range(5):
        rho = random_density(rng)
        assert abs(f @ gen.matrix @ vectorize(rho)) <= 1e-12


def test_gibbs_is_stationary(paper):
    d, r = model(paper)
    gen = build_generator(d, r)
    residual = gen.apply(gibbs_reference(d, paper.T1))
    assert np.abs(residual).max() <= 1e-10


def test_gibbs_reference_examples(paper):
    d, _ = model(paper)
    np.testing.assert_allclose(gibbs_reference(d, 1e15), np.eye(6) / 6, atol=1e-10)
    g = gibbs_reference(d, paper.omega_a).diagonal().real
    assert g[5] / g[2] == pytest.approx(math.exp(d.omega[2] / paper.omega_a), rel=1e-12)
    assert g[5] / g[2] == pytest.approx(math.e, rel=1e-5)
    with pytest.raises(OracleError):
        gibbs_reference(d, 0.0)


def test_pade_matches_scipy():
    rng = np.random.default_rng(4)
    for scale in (1e-3, 1.0, 30.0, 500.0):
        A = rng.normal(size=(8, 8)) * scale / 8
        np.testing.assert_allclose(pade13_expm(A), scipy.linalg.expm(A), rtol=1e-11, atol=1e-13)


def test_block_expm_matches_scipy():
    A = np.zeros((5, 5))
    A[0, 1], A[1, 0] = 3e6, -3e6
    A[2:, 2:] = np.array([[-1.0, 0.5, 0.0], [0.5, -2.0, 0.3], [0.0, 0.3, -0.1]])
    assert [list(b) for b in coupled_blocks(A)] == [[0, 1], [2, 3, 4]]
    E = block_expm(A)
    np.testing.assert_allclose(E[2:, 2:], scipy.linalg.expm(A[2:, 2:]), rtol=1e-13)
    np.testing.assert_allclose(E[:2, :2], [[math.cos(3e6), math.sin(3e6)], [-math.sin(3e6), math.cos(3e6)]],
                               atol=1e-9)


def test_expm_propagate_examples(paper):
    d, r = model(paper)
    gen = build_generator(d, r)
    rho = random_density(np.random.default_rng(2))
    np.testing.assert_allclose(expm_propagate(gen, rho, 0.0), rho, atol=1e-15)
    with pytest.raises(OracleError):
        expm_propagate(gen, rho, -1.0)


def test_expm_long_time_is_gibbs(resonant):
    p = resonant.with_temperatures(4e6, 4e6, 4e6)
    d, r = model(p)
    late = expm_propagate(build_generator(d, r), DensityMatrix.ground().matrix, 1e8)
    assert np.abs(late - gibbs_reference(d, 4e6)).max() <= 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_propagate_matches_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    p = random_params(rng, temperatures="mixed")
    d, r = model(p)
    gen = build_generator(d, r)
    rho0 = random_density(rng)
    times = np.logspace(-2, 3, 20)
    traj = propagate(DensityMatrix(rho0), d, r, times)
    for i, t in enumerate(times):
        assert np.abs(expm_propagate(gen, rho0, t) - traj.states[i]).max() <= 1e-8


def test_propagate_matches_oracle_paper_scale(paper):
    d, r = model(paper)
    gen = build_generator(d, r)
    times = np.logspace(-2, 3, 20)
    traj = propagate(DensityMatrix.ground(), d, r, times)
    for i, t in enumerate(times):
        assert np.abs(expm_propagate(gen, DensityMatrix.ground().matrix, t) - traj.states[i]).max() <= 1e-8


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_no_growing_modes_and_unique_steady_state(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng, temperatures="mixed")
    p = p.with_temperatures(p.T1 + 1.0, p.T2 + 1.0, p.T3 + 1.0)
    d, r = model(p)
    gen = build_generator(d, r)
    assert spectral_abscissa(gen) <= 1e-10
    # the real split doubles every eigenvalue (rho and i rho); count on the complex generator
    K = gen.matrix[:DIM, :DIM] + 1j * gen.matrix[DIM:, :DIM]
    np.testing.assert_array_equal(gen.matrix[DIM:, DIM:], gen.matrix[:DIM, :DIM])
    eig = np.linalg.eigvals(K)
    assert np.sum(np.abs(eig) < 1e-9) == 1
    late = propagate(DensityMatrix.ground(), d, r, np.array([1e6])).states[0]
    assert np.abs(steady_state(gen) - late).max() <= 1e-6


import numpy as np
import pytest

from thermal_link.core import SystemParams, with_equal_occupation
from thermal_link.dissipation import transition_rates
from thermal_link.spectral import solve

OMEGA_A = 4.0e6


@pytest.fixture
def resonant():
    """Delta = 0, g = nu = 5: the uniform path-graph case."""
    return SystemParams(delta=0.0)


@pytest.fixture
def paper():
    """Delta = 0.1 omega_a, g = nu = 5, all baths at one thermal photon."""
    return with_equal_occupation(SystemParams(), 1.0)


def random_params(rng, temperatures="equal"):
    """Admissible parameters at a moderate scale where every level relaxes quickly."""
    omega_a = rng.uniform(40.0, 200.0)
    p = dict(
        omega_a=omega_a,
        delta=rng.uniform(-0.2, 0.2) * omega_a,
        g1=rng.uniform(0.5, 6.0),
        g2=rng.uniform(0.5, 6.0),
        nu=rng.uniform(0.5, 6.0),
        gamma1=rng.uniform(0.3, 2.0),
        gamma2=rng.uniform(0.3, 2.0),
        gamma3=rng.uniform(0.3, 2.0),
    )
    if temperatures == "equal":
        T = rng.uniform(0.3, 2.0) * omega_a
        p.update(T1=T, T2=T, T3=T)
    else:
        p.update(T1=rng.uniform(0, 2) * omega_a, T2=rng.uniform(0, 2) * omega_a,
                 T3=rng.uniform(0, 2) * omega_a)
    return SystemParams(**p)


def random_density(rng, n=6):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def model(params):
    dressed = solve(params)
    return dressed, transition_rates(dressed, params)

"""Brute-force reference dynamics used to verify :mod:`thermal_link.dynamics`.

The master equation in the dressed basis is written out entry by entry as a
linear map on the 36 complex matrix elements, split into real and imaginary
parts (a 72x72 real generator), and exponentiated with scaling and squaring.
Nothing here shares code with the closed-form propagator it checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipation import TransitionRates
from .spectral import GROUND, N_STATES, DressedBasis

DIM = N_STATES * N_STATES

# Pade(13) coefficients and theta_13 from Higham (2005)
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


class OracleError(ArithmeticError):
    pass


@dataclass(frozen=True)
class VectorizedGenerator:
    """Real 72x72 generator acting on ``[Re vec(rho), Im vec(rho)]`` (row-stacked)."""

    matrix: np.ndarray

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvectorize(self.matrix @ vectorize(rho))


def vectorize(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.concatenate([rho.real.ravel(), rho.imag.ravel()])


def unvectorize(vec: np.ndarray) -> np.ndarray:
    return (vec[:DIM] + 1j * vec[DIM:]).reshape(N_STATES, N_STATES)


def _idx(m: int, n: int) -> int:
    return m * N_STATES + n


def _bohr(dressed: DressedBasis, m: int, n: int) -> float:
    # Omega_m - Omega_n, through the shifted levels when both are excited
    if m != GROUND and n != GROUND:
        return float(dressed.relative[m] - dressed.relative[n])
    return float(dressed.omega[m] - dressed.omega[n])


def build_generator(dressed: DressedBasis, rates: TransitionRates) -> VectorizedGenerator:
    """Generator of the dressed-basis master equation, one Kronecker delta at a time."""
    K = np.zeros((DIM, DIM), dtype=complex)
    g = GROUND
    delta = np.eye(N_STATES)
    for m in range(N_STATES):
        for n in range(N_STATES):
            row = _idx(m, n)
            # -i (Omega_m - Omega_n) rho_mn
            K[row, row] += -1j * _bohr(dressed, m, n)
            for k in range(GROUND):
                down = rates.down[k] / 2.0
                up = rates.up[k] / 2.0
                # downward jumps k -> 6
                K[row, _idx(k, k)] += down * 2.0 * delta[m, g] * delta[g, n]
                K[row, _idx(k, n)] -= down * delta[m, k]
                K[row, _idx(m, k)] -= down * delta[k, n]
                # upward jumps 6 -> k
                K[row, _idx(g, g)] += up * 2.0 * delta[m, k] * delta[k, n]
                K[row, _idx(g, n)] -= up * delta[m, g]
                K[row, _idx(m, g)] -= up * delta[g, n]
    real = np.block([[K.real, -K.imag], [K.imag, K.real]])
    return VectorizedGenerator(real)


def pade13_expm(A: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with the degree-13 Pade approximant."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    s = 0
    if norm > _THETA13:
        s = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    A = A / (2.0 ** s)
    b = _PADE13
    ident = np.eye(n)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


def coupled_blocks(A: np.ndarray) -> list[np.ndarray]:
    """Index sets of the connected components of the sparsity graph of ``A``."""
    linked = (A != 0) | (A.T != 0)
    seen = np.zeros(A.shape[0], dtype=bool)
    blocks = []
    for start in range(A.shape[0]):
        if seen[start]:
            continue
        stack, members = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            members.append(i)
            for j in np.flatnonzero(linked[i] & ~seen):
                seen[j] = True
                stack.append(int(j))
        blocks.append(np.array(sorted(members)))
    return blocks


def block_expm(A: np.ndarray) -> np.ndarray:
    """Exponential of ``A`` computed block by block over its decoupled components.

    Keeps the scaling of slow blocks independent of fast ones.
    """
    E = np.zeros_like(A, dtype=float)
    for idx in coupled_blocks(A):
        E[np.ix_(idx, idx)] = pade13_expm(A[np.ix_(idx, idx)])
    return E


def expm_propagate(gen: VectorizedGenerator, rho0: np.ndarray, t: float) -> np.ndarray:
    """``exp(t * gen)`` applied to ``rho0``; result symmetrised to be Hermitian."""
    if t < 0:
        raise OracleError("propagation time must be non-negative")
    vec = block_expm(gen.matrix * t) @ vectorize(rho0)
    rho = unvectorize(vec)
    skew = float(np.abs(rho - rho.conj().T).max())
    if skew > 1e-9:
        raise OracleError(f"propagated state lost Hermiticity by {skew:.2e}")
    return 0.5 * (rho + rho.conj().T)


def gibbs_reference(dressed: DressedBasis, T: float) -> np.ndarray:
    """Diagonal dressed Gibbs state ``exp(-Omega_k / T) / Z``."""
    if not T > 0:
        raise OracleError("Gibbs state needs a positive temperature")
    # ground energy is exactly 0, the minimum of the spectrum
    weights = np.exp(-dressed.omega / T)
    return np.diag(weights / weights.sum()).astype(complex)


def spectral_abscissa(gen: VectorizedGenerator) -> float:
    return float(np.linalg.eigvals(gen.matrix).real.max())


def steady_state(gen: VectorizedGenerator) -> np.ndarray:
    """Unit-trace null vector of the generator (smallest singular vector)."""
    _, _, vh = np.linalg.svd(gen.matrix)
    rho = unvectorize(vh[-1])
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise OracleError("null vector has no trace; steady state not unique")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def trace_functional() -> np.ndarray:
    """Row vector ``f`` with ``f @ vectorize(rho) == Re tr(rho)``."""
    f = np.zeros(2 * DIM)
    for m in range(N_STATES):
        f[_idx(m, m)] = 1.0
    return f

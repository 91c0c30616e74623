"""Exact propagation of the dressed-basis density matrix.

The generator is time independent and decouples into a 6x6 rate equation
for the populations and one scalar equation per coherence, so no time
stepping is needed even over nine decades of ``gamma * t``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .dissipation import TransitionRates
from .oracle import pade13_expm
from .spectral import GROUND, N_STATES, DressedBasis

DRESSED = "dressed"
BARE = "bare"

# eigenvector matrices worse conditioned than this count as defective
_MAX_CONDITION = 1e8


class DynamicsError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    basis: str = DRESSED

    def __post_init__(self):
        if self.basis not in (DRESSED, BARE):
            raise DynamicsError(f"unknown basis {self.basis!r}")
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (N_STATES, N_STATES):
            raise DynamicsError("density matrix must be 6x6")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def ground(cls) -> "DensityMatrix":
        """The unexcited initial state |gg000>, which is also dressed level 6."""
        rho = np.zeros((N_STATES, N_STATES), dtype=complex)
        rho[GROUND, GROUND] = 1.0
        return cls(rho, DRESSED)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_times, 6, 6) complex, dressed basis
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i: int) -> DensityMatrix:
        return DensityMatrix(self.states[i], DRESSED)

    @property
    def populations(self) -> np.ndarray:
        return np.einsum("tkk->tk", self.states).real


def log_time_grid(lo: float = 1e-2, hi: float = 1e7, per_decade: int = 60) -> np.ndarray:
    """Logarithmic grid of ``gamma * t`` including both end points."""
    if not (0 < lo < hi) or per_decade < 1:
        raise DynamicsError("time grid needs 0 < lo < hi and at least one point per decade")
    start, stop = np.log10(lo), np.log10(hi)
    count = int(round((stop - start) * per_decade))
    exponents = start + np.arange(count + 1) / per_decade
    grid = 10.0 ** exponents
    grid[0], grid[-1] = lo, hi
    return grid


def population_generator(rates: TransitionRates) -> np.ndarray:
    """Rate matrix ``M`` with ``dp/dt = M p`` for the dressed populations."""
    M = np.zeros((N_STATES, N_STATES))
    for k in range(GROUND):
        M[k, k] = -rates.down[k]
        M[k, GROUND] = rates.up[k]
        M[GROUND, k] = rates.down[k]
    M[GROUND, GROUND] = -rates.up.sum()
    return M


def coherence_rates(dressed: DressedBasis, rates: TransitionRates) -> np.ndarray:
    """Complex exponents ``-i (Omega_m - Omega_n) - Gamma_mn / 2`` for every pair."""
    level = np.zeros(N_STATES)
    level[:GROUND] = dressed.relative
    phase = level[:, None] - level[None, :]
    phase[GROUND, :GROUND] = -dressed.omega[:GROUND]
    phase[:GROUND, GROUND] = dressed.omega[:GROUND]
    width = np.zeros(N_STATES)
    width[:GROUND] = rates.down
    width[GROUND] = rates.up.sum()
    gamma = width[:, None] + width[None, :]
    return -1j * phase - 0.5 * gamma


def _secular_offset(offsets: np.ndarray, weights: np.ndarray, hi: float) -> float:
    """Root ``tau`` in ``(0, hi)`` of ``1 + sum_k w_k / (offsets_k - tau)``, by bisection.

    Working with the offset from the pole keeps roots next to a tiny pole
    accurate to the last digits.
    """
    lo = 0.0
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if 1.0 + float(np.sum(weights / (offsets - mid))) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def population_modes(rates: TransitionRates) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """Decay constants ``mu``, right eigenvectors ``V`` and dual rows ``W`` of the rate matrix.

    The star-shaped generator ``M`` has closed-form modes: a pumped mode with
    rate ``mu`` solves ``1 + sum_k up_k / (down_k - mu) = 0`` and has
    ``v_k = up_k / (down_k - mu)``, ``y_k = down_k / (down_k - mu)`` and
    ground components 1.  An unpumped level decays alone at ``down_k``.
    Every component is then accurate to relative precision, which an
    eigensolver cannot offer for a slow mode next to the stationary one.
    Returns ``None`` for coincident poles, where the caller falls back.
    """
    down, up = np.asarray(rates.down, float), np.asarray(rates.up, float)
    pumped = np.flatnonzero(up > 0)
    idle = np.flatnonzero((up == 0) & (down > 0))
    frozen = np.flatnonzero((up == 0) & (down == 0))
    poles = np.sort(down[pumped])
    if np.any(np.diff(poles) == 0) or np.any(np.isin(down[idle], poles)):
        return None

    modes = []
    v0 = np.zeros(N_STATES)
    v0[pumped] = up[pumped] / down[pumped]
    v0[GROUND] = 1.0
    y0 = np.ones(N_STATES)
    y0[frozen] = 0.0
    modes.append((0.0, v0, y0))
    for k in frozen:
        e = np.zeros(N_STATES)
        e[k] = 1.0
        modes.append((0.0, e, e))
    for k in idle:
        v = np.zeros(N_STATES)
        v[pumped] = up[pumped] / (down[pumped] - down[k])
        v[k] = -1.0 - v[pumped].sum()
        v[GROUND] = 1.0
        y = np.zeros(N_STATES)
        y[k] = 1.0
        modes.append((float(down[k]), v, y))
    for i, pole in enumerate(poles):
        offsets = down - pole
        hi = poles[i + 1] - pole if i + 1 < len(poles) else up.sum()
        tau = _secular_offset(offsets[pumped], up[pumped], hi)
        gap = offsets - tau
        v = np.zeros(N_STATES)
        v[pumped] = up[pumped] / gap[pumped]
        v[GROUND] = 1.0
        y = np.ones(N_STATES)
        y[:GROUND] = np.where(down > 0, down / np.where(gap != 0, gap, 1.0), 0.0)
        modes.append((float(pole + tau), v, y))
    if len(modes) != N_STATES:
        return None
    mu = np.array([m[0] for m in modes])
    V = np.column_stack([m[1] for m in modes])
    W = np.array([m[2] / (m[2] @ m[1]) for m in modes])
    return mu, V, W


def _population_propagator(M: np.ndarray, times: np.ndarray, rates: TransitionRates | None = None) -> np.ndarray:
    scale = max(1.0, float(np.abs(M).max()))
    modes = population_modes(rates) if rates is not None else None
    if modes is not None:
        mu, V, W = modes
        # V @ W sums O(1) projector entries; W @ V would cancel huge components
        closes = (np.abs(V @ W - np.eye(N_STATES)).max() < 1e-12
                  and np.abs(V @ np.diag(-mu) @ W - M).max() < 1e-12 * scale)
        if closes:
            return np.einsum("ij,tj,jk->tik", V, np.exp(-np.multiply.outer(times, mu)), W)
    lam, V = np.linalg.eig(M)
    # a star-shaped rate matrix is reversible, so its spectrum is real
    if np.abs(lam.imag).max() > 1e-12 * max(1.0, np.abs(lam).max()):
        return np.stack([pade13_expm(M * t) for t in times])
    lam, V = lam.real, V.real
    if np.linalg.cond(V) > _MAX_CONDITION:
        return np.stack([pade13_expm(M * t) for t in times])
    Vinv = np.linalg.inv(V)
    # columns of M sum to zero, so one eigenvalue is exactly 0
    lam = np.minimum(lam, 0.0)
    lam[np.argmin(np.abs(lam))] = 0.0
    expo = np.exp(np.multiply.outer(times, lam))
    return np.einsum("ij,tj,jk->tik", V, expo, Vinv)


def _hash(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


def propagate(rho0: DensityMatrix, dressed: DressedBasis, rates: TransitionRates,
              times: np.ndarray) -> Trajectory:
    """Exact solution of the dressed-basis master equation on ``times``."""
    if rho0.basis != DRESSED:
        raise DynamicsError("initial state must be given in the dressed basis")
    if rho0.hermiticity_error() > 1e-12:
        raise DynamicsError("initial state is not Hermitian")
    if not (np.all(np.isfinite(rates.down)) and np.all(np.isfinite(rates.up))):
        raise DynamicsError("transition rates contain NaN or infinity")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise DynamicsError("time grid must be non-negative and strictly increasing")

    rho = rho0.matrix
    P = _population_propagator(population_generator(rates), times, rates)
    pops = P @ rho.diagonal().real

    exponents = coherence_rates(dressed, rates)
    states = rho[None, :, :] * np.exp(np.multiply.outer(times, exponents))
    diag = np.arange(N_STATES)
    states[:, diag, diag] = pops
    provenance = {
        "rates": _hash(rates.down, rates.up),
        "spectrum": _hash(dressed.omega, dressed.C),
    }
    return Trajectory(times, states, provenance)


def to_bare(rho: DensityMatrix, dressed: DressedBasis) -> DensityMatrix:
    """Rotate a dressed-basis state into the bare basis: ``C rho C^T``."""
    if rho.basis != DRESSED:
        raise DynamicsError("expected a dressed-basis density matrix")
    C = dressed.C
    return DensityMatrix(C @ rho.matrix @ C.T, BARE)


def trajectory_to_bare(traj: Trajectory, dressed: DressedBasis) -> np.ndarray:
    C = dressed.C
    return np.einsum("ij,tjk,lk->til", C, traj.states, C)

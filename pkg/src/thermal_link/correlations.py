"""Vacuum projection onto the atoms and two-qubit correlation measures.

The projected atomic state lives in the basis |gg>, |ge>, |eg>, |ee> with
atom 1 as qubit A and atom 2 as qubit B.  It has X form with an empty |ee>
row, described by three populations and one real coherence.  Entropies are
in bits.

Classical correlation is maximised over projective measurements on qubit B
with unit Bloch vector at polar angle ``theta``.  For this state family the
conditional entropy depends on ``theta`` only, and ``theta = pi/2``
(a sigma_x-type measurement) is the candidate that usually wins.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .spectral import GROUND

VACUUM_MIN = 1e-14
N_POLAR = 181
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DISCORD_AGREE = 1e-6
DISCORD_DIVERGE = 1e-4


class CorrelationError(ArithmeticError):
    pass


class DiscordDiscrepancy(UserWarning):
    pass


@dataclass(frozen=True)
class XState:
    """Normalised vacuum-projected atomic state; ``p000`` is the projection probability."""

    r11: float
    r22: float
    r33: float
    r23: float
    p000: float = 1.0
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not self.check:
            return
        pops = (self.r11, self.r22, self.r33)
        if min(pops) < -1e-12:
            raise CorrelationError("negative population in X state")
        if abs(sum(pops) - 1.0) > 1e-10:
            raise CorrelationError("X state populations do not sum to one")
        bound = math.sqrt(max(self.r22, 0.0) * max(self.r33, 0.0))
        if abs(self.r23) > bound + 1e-10:
            raise CorrelationError("X state coherence violates positivity")

    def matrix(self) -> np.ndarray:
        rho = np.zeros((4, 4))
        rho[0, 0], rho[1, 1], rho[2, 2] = self.r11, self.r22, self.r33
        rho[1, 2] = rho[2, 1] = self.r23
        return rho

    def mirrored(self) -> "XState":
        """Swap the two qubits."""
        return XState(self.r11, self.r33, self.r22, self.r23, self.p000, self.check)


@dataclass(frozen=True)
class CorrelationRecord:
    concurrence: float
    entanglement_of_formation: float
    mutual_information: float
    classical_correlation: float
    quantum_discord: float
    p000: float

    def as_row(self) -> tuple[float, ...]:
        return (self.concurrence, self.entanglement_of_formation, self.quantum_discord,
                self.classical_correlation, self.mutual_information, self.p000)


def project_vacuum(rho: np.ndarray) -> XState:
    """Condition a bare-basis state on finding both cavities and the fiber empty."""
    rho = np.asarray(getattr(rho, "matrix", rho))
    p_eg, p_ge, p_gg = rho[0, 0].real, rho[4, 4].real, rho[GROUND, GROUND].real
    p000 = float(p_eg + p_ge + p_gg)
    if p000 < VACUUM_MIN:
        raise CorrelationError("vacuum projection has vanishing probability")
    return XState(p_gg / p000, p_ge / p000, p_eg / p000, float(rho[4, 0].real) / p000, p000)


def concurrence(x: XState) -> float:
    return min(1.0, max(0.0, 2.0 * abs(x.r23)))


def binary_entropy(p):
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    return np.where((p <= 0) | (p >= 1), 0.0, h)


def entanglement_of_formation(C: float) -> float:
    if C < -1e-9 or C > 1 + 1e-9:
        raise CorrelationError("concurrence outside [0, 1]")
    C = min(1.0, max(0.0, C))
    return float(binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - C * C))))


def spectral_entropy(weights) -> float:
    """Shannon entropy in bits of a probability vector (eigenvalues of a state)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < -1e-12):
        raise CorrelationError("negative weight in entropy")
    if abs(w.sum() - 1.0) > 1e-9:
        raise CorrelationError("weights do not sum to one")
    w = w[w > 0]
    return float(-(w * np.log2(w)).sum())


def _block_eigenvalues(a, d, x):
    """Eigenvalues of [[a, x], [x*, d]] (vectorised)."""
    mean = 0.5 * (a + d)
    radius = 0.5 * np.sqrt((a - d) ** 2 + 4.0 * np.abs(x) ** 2)
    return mean + radius, mean - radius


def _entropy_from(*parts) -> float:
    return spectral_entropy(np.clip(np.array(parts, dtype=float), 0.0, None))


def marginal_entropies(x: XState) -> tuple[float, float]:
    s_a = float(binary_entropy(x.r11 + x.r22))
    s_b = float(binary_entropy(x.r11 + x.r33))
    return s_a, s_b


def joint_entropy(x: XState) -> float:
    lp, lm = _block_eigenvalues(x.r22, x.r33, x.r23)
    return _entropy_from(x.r11, lp, lm)


def mutual_information(x: XState) -> float:
    s_a, s_b = marginal_entropies(x)
    return s_a + s_b - joint_entropy(x)


def conditional_entropy(x: XState, theta, phi=0.0):
    """Average entropy of A after measuring B along Bloch angles ``(theta, phi)``.

    Broadcasts over ``theta`` and ``phi``.
    """
    return _conditional_entropy(x.r11, x.r22, x.r33, x.r23 * np.exp(-1j * np.asarray(phi)),
                                np.asarray(theta, dtype=float))


def _conditional_entropy(r11, r22, r33, r23, theta):
    c = np.cos(theta)
    coh = 0.5 * np.abs(r23) * np.sin(theta)
    total = 0.0
    for sign in (1.0, -1.0):
        up, dn = 0.5 * (1 + sign * c), 0.5 * (1 - sign * c)
        a = r11 * up + r22 * dn
        d = r33 * up
        p = a + d
        lp, _ = _block_eigenvalues(a, d, coh)
        safe = np.where(p > 0, p, 1.0)
        total = total + p * binary_entropy(np.where(p > 0, lp / safe, 1.0))
    return total


def _sigma_x_entropy(r11, r22, r33, r23):
    radius = np.sqrt((r11 + r22 - r33) ** 2 + 4.0 * np.abs(r23) ** 2)
    return binary_entropy(0.5 * (1.0 + np.minimum(radius, 1.0)))


def sigma_x_conditional_entropy(x: XState) -> float:
    """Closed form at theta = pi/2, the (k, l) = 1/2 measurement."""
    return float(_sigma_x_entropy(x.r11, x.r22, x.r33, x.r23))


def _golden_min(f, lo, hi, iterations: int = 64):
    """Vectorised golden-section search; ``f`` maps an array of angles to values."""
    a, b = np.array(lo, dtype=float), np.array(hi, dtype=float)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        left = fc < fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_left = b - _GOLDEN * (b - a)
        d_right = a + _GOLDEN * (b - a)
        c, d = np.where(left, c_left, d), np.where(left, c, d_right)
        fc, fd = np.where(left, f(c_left), fd), np.where(left, fc, f(d_right))
    t = 0.5 * (a + b)
    return t, f(t)


@dataclass(frozen=True)
class MeasurementOptimum:
    """Minimal conditional entropy, its polar angle, and the sigma_x candidate value."""

    conditional_entropy: np.ndarray
    theta: np.ndarray
    sigma_x_value: np.ndarray

    @property
    def sigma_x_gap(self) -> np.ndarray:
        """How much the sigma_x candidate exceeds the optimum (0 when it is optimal)."""
        return self.sigma_x_value - self.conditional_entropy


def optimize_measurement(r11, r22, r33, r23) -> MeasurementOptimum:
    """Minimise the conditional entropy of A over projective measurements on B.

    Vectorised over states.  The objective depends on the azimuth only
    through ``|r23 exp(-i phi)|``, so the Bloch sphere reduces to 181 polar
    angles exactly.  The closed-form sigma_x candidate, the polar grid and a
    golden-section refinement around the best grid angle all compete; the
    smallest value wins.
    """
    r11, r22, r33, r23 = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (r11, r22, r33, r23))
    col = (lambda v: v[:, None])
    thetas = np.linspace(0.0, math.pi, N_POLAR)
    grid = _conditional_entropy(col(r11), col(r22), col(r33), col(r23), thetas[None, :])
    best = np.argmin(grid, axis=1)
    lo = thetas[np.maximum(best - 1, 0)]
    hi = thetas[np.minimum(best + 1, N_POLAR - 1)]
    t_ref, s_ref = _golden_min(lambda t: _conditional_entropy(r11, r22, r33, r23, t), lo, hi)

    s_x = _sigma_x_entropy(r11, r22, r33, r23)
    values = np.stack([s_x, grid[np.arange(len(best)), best], s_ref])
    angles = np.stack([np.full_like(s_x, math.pi / 2), thetas[best], t_ref])
    pick = np.argmin(values, axis=0)
    cols = np.arange(values.shape[1])
    return MeasurementOptimum(values[pick, cols], angles[pick, cols], s_x)


def minimize_conditional_entropy(x: XState) -> MeasurementOptimum:
    return optimize_measurement(x.r11, x.r22, x.r33, x.r23)


def classical_correlation(x: XState) -> float:
    s_a, _ = marginal_entropies(x)
    return s_a - float(minimize_conditional_entropy(x).conditional_entropy[0])


def fanchini_discord(x: XState) -> float:
    """Closed-form X-state discord (measurement on B): min over sigma_z and sigma_x.

    Independent of the grid search: works on the full 4x4 matrix with the
    general X-state element formulas (rho_44 and rho_14 kept, here zero).
    """
    rho = x.matrix()
    r11, r22, r33, r44 = np.diag(rho)
    r23, r14 = abs(rho[1, 2]), abs(rho[0, 3])
    eig = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    s_ab = float(-(eig[eig > 0] * np.log2(eig[eig > 0])).sum())
    s_b = float(binary_entropy(r11 + r33))

    def h(p: float) -> float:
        return float(binary_entropy(p))

    # sigma_z on B: outcomes g (r11, r33) and e (r22, r44)
    p0, p1 = r11 + r33, r22 + r44
    s_z = (p0 * h(r11 / p0) if p0 > 0 else 0.0) + (p1 * h(r22 / p1) if p1 > 0 else 0.0)
    gamma = math.sqrt((r11 + r22 - r33 - r44) ** 2 + 4.0 * (r14 + r23) ** 2)
    s_x = h(0.5 * (1.0 + min(gamma, 1.0)))
    # discord = S(B) - S(AB) + min conditional entropy
    return s_b - s_ab + min(s_z, s_x)


def quantum_discord(x: XState, *, check: bool = True) -> float:
    """Discord with measurement on qubit B, cross-checked against :func:`fanchini_discord`."""
    qd = mutual_information(x) - classical_correlation(x)
    if check:
        other = fanchini_discord(x)
        gap = abs(qd - other)
        if gap > DISCORD_DIVERGE:
            raise CorrelationError(f"discord algorithms diverge by {gap:.3e}")
        if gap > DISCORD_AGREE:
            warnings.warn(f"discord algorithms differ by {gap:.3e}", DiscordDiscrepancy, stacklevel=2)
    return qd


def correlation_record(x: XState) -> CorrelationRecord:
    C = concurrence(x)
    mi = mutual_information(x)
    cc = classical_correlation(x)
    qd = mi - cc
    other = fanchini_discord(x)
    if abs(qd - other) > DISCORD_DIVERGE:
        raise CorrelationError(f"discord algorithms diverge by {abs(qd - other):.3e}")
    return CorrelationRecord(C, entanglement_of_formation(C), mi, cc, qd, x.p000)


def _entropy_bits(*probs):
    total = 0.0
    for p in probs:
        p = np.clip(p, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            total = total - np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return total


def correlation_arrays(bare_states: np.ndarray) -> dict[str, np.ndarray]:
    """Every correlation measure for a stack of bare-basis states, shape ``(n, 6, 6)``.

    Returns a dict of 1-d arrays keyed ``C, E, QD, CC, I, P000`` plus the
    diagnostics ``theta`` (optimal polar angle), ``sigma_x_gap``,
    ``discord_gap`` (against :func:`fanchini_discord`) and ``QD_A``
    (discord with the measurement on qubit A instead).
    """
    rho = np.asarray(bare_states)
    p_eg = rho[:, 0, 0].real
    p_ge = rho[:, 4, 4].real
    p_gg = rho[:, GROUND, GROUND].real
    p000 = p_eg + p_ge + p_gg
    if np.any(p000 < VACUUM_MIN):
        raise CorrelationError("vacuum projection has vanishing probability")
    r11, r22, r33 = p_gg / p000, p_ge / p000, p_eg / p000
    r23 = rho[:, 4, 0].real / p000

    C = np.clip(2.0 * np.abs(r23), 0.0, 1.0)
    E = binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - C * C)))
    s_a = binary_entropy(r11 + r22)
    s_b = binary_entropy(r11 + r33)
    lp, lm = _block_eigenvalues(r22, r33, r23)
    s_ab = _entropy_bits(r11, lp, lm)
    mi = s_a + s_b - s_ab
    opt = optimize_measurement(r11, r22, r33, r23)
    cc = s_a - opt.conditional_entropy
    qd = mi - cc
    # swapping the qubits measures atom 1 instead
    opt_a = optimize_measurement(r11, r33, r22, r23)
    qd_a = mi - (s_b - opt_a.conditional_entropy)

    reference = np.array([
        fanchini_discord(XState(a, b, c, d, check=False))
        for a, b, c, d in zip(r11.tolist(), r22.tolist(), r33.tolist(), r23.tolist())
    ])
    gap = np.abs(qd - reference)
    if np.any(gap > DISCORD_DIVERGE):
        raise CorrelationError(f"discord algorithms diverge by {gap.max():.3e}")
    return {
        "C": C, "E": E, "QD": qd, "CC": cc, "I": mi, "P000": p000,
        "theta": opt.theta, "sigma_x_gap": opt.sigma_x_gap, "discord_gap": gap, "QD_A": qd_a,
    }

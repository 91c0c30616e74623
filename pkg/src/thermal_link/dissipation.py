"""Thermal occupations and KMS-balanced dressed-state transition rates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SystemParams
from .spectral import GROUND, MODE_STATES, DressedBasis

# beyond this ratio exp(omega/T) overflows; 1/(e^x - 1) ~ e^-x is exact to double precision
_OVERFLOW_RATIO = 700.0
RWA_RATIO_MIN = 10.0


class RateError(ArithmeticError):
    pass


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein mean photon number ``1 / (exp(omega / T) - 1)``."""
    if not omega > 0:
        raise RateError("positive Bohr frequency required")
    if T < 0:
        raise RateError("temperature must be non-negative")
    if T == 0:
        return 0.0
    x = omega / T
    if x > _OVERFLOW_RATIO:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class TransitionRates:
    """Downward (k -> ground) and upward (ground -> k) rates for k = 1..5.

    ``weights[j, k]`` is the squared overlap of dressed level ``k + 1`` with
    the one-photon state of mode ``j`` (cavity 1, fiber, cavity 2) and
    ``nbar[j, k]`` the occupation of bath ``j`` at that level's frequency.
    """

    down: np.ndarray
    up: np.ndarray
    weights: np.ndarray
    nbar: np.ndarray

    @property
    def total_up(self) -> float:
        return float(self.up.sum())

    def decay_gap(self) -> np.ndarray:
        return self.down - self.up


def transition_rates(dressed: DressedBasis, params: SystemParams) -> TransitionRates:
    levels = dressed.omega[:GROUND]
    if np.any(levels <= 0):
        raise RateError("excited dressed level below ground")
    weights = dressed.C[list(MODE_STATES), :GROUND] ** 2
    gammas = params.gammas
    temps = params.temperatures
    nbar = np.array([[thermal_occupation(w, T) for w in levels] for T in temps])
    down = np.zeros(GROUND)
    up = np.zeros(GROUND)
    for j in range(len(MODE_STATES)):
        down += weights[j] * gammas[j] * (nbar[j] + 1.0)
        up += weights[j] * gammas[j] * nbar[j]
    return TransitionRates(down, up, weights, nbar)


@dataclass(frozen=True)
class CheckReport:
    ratio: float
    thermal_ratio: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.warnings


def rwa_check(dressed: DressedBasis, rates: TransitionRates, params: SystemParams) -> CheckReport:
    """Ratio of twice the weakest coupling to the fastest damping rate; warns below 10.

    The damping rate of a transition is its temperature-independent part
    ``down - up``.  ``thermal_ratio`` uses the full thermally enhanced
    ``down`` instead and is reported for information only.
    """
    coupling = 2.0 * min(params.g1, params.g2, params.nu)

    def _ratio(rate: float) -> float:
        return math.inf if rate == 0 else coupling / rate

    damping = rates.weights * np.array(params.gammas)[:, None]
    ratio = _ratio(float(damping.sum(axis=0).max()))
    thermal = _ratio(float(rates.down.max()))
    warnings = []
    # rounding slack so the boundary case g = 5 gamma is not flagged
    if ratio < RWA_RATIO_MIN * (1 - 1e-9):
        warnings.append(
            f"rotating-wave approximation questionable: 2g/gamma_max = {ratio:.3g} < {RWA_RATIO_MIN:g}"
        )
    return CheckReport(ratio, thermal, tuple(warnings))

"""End-to-end pipeline: spectrum, rates, propagation and correlations for one parameter point."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ParameterError, SystemParams, validate
from .correlations import correlation_arrays
from .dissipation import TransitionRates, transition_rates
from .dynamics import DensityMatrix, Trajectory, propagate, trajectory_to_bare
from .spectral import DressedBasis, solve

COLUMNS = ("C", "E", "QD", "CC", "I", "P000")


@dataclass(frozen=True)
class Simulation:
    params: SystemParams
    dressed: DressedBasis
    rates: TransitionRates
    trajectory: Trajectory
    bare: np.ndarray
    table: dict

    @property
    def times(self) -> np.ndarray:
        return self.trajectory.times

    def column(self, name: str) -> np.ndarray:
        return self.table[name]


def simulate(params: SystemParams, times, rho0: DensityMatrix | None = None) -> Simulation:
    """Run the model from ``rho0`` (default: the unexcited state) on ``times``."""
    report = validate(params)
    if not report.ok:
        raise ParameterError("; ".join(report.problems))
    dressed = solve(params)
    rates = transition_rates(dressed, params)
    traj = propagate(rho0 or DensityMatrix.ground(), dressed, rates, np.asarray(times, dtype=float))
    bare = trajectory_to_bare(traj, dressed)
    table = correlation_arrays(bare)
    return Simulation(params, dressed, rates, traj, bare, table)


def plateau_value(times: np.ndarray, values: np.ndarray, lo: float = 1e6, hi: float = 1e7) -> tuple[float, float]:
    """Mean of ``values`` over ``lo <= t <= hi`` and its relative spread."""
    mask = (times >= lo) & (times <= hi)
    window = values[mask]
    mean = float(window.mean())
    spread = float((window.max() - window.min()) / mean) if mean else 0.0
    return mean, spread


def first_crossing(times: np.ndarray, values: np.ndarray, level: float) -> float:
    """First time ``values`` reaches ``level``, linearly interpolated in log time."""
    above = np.flatnonzero(values >= level)
    if len(above) == 0:
        return float("inf")
    i = int(above[0])
    if i == 0:
        return float(times[0])
    t0, t1 = np.log10(times[i - 1]), np.log10(times[i])
    v0, v1 = values[i - 1], values[i]
    frac = (level - v0) / (v1 - v0)
    return float(10.0 ** (t0 + frac * (t1 - t0)))

"""Built-in figure scenarios and generic parameter sweeps.

Bath temperatures in scenarios are given as occupations at the lowest
excited dressed frequency (Omega_5) and converted per point.  The default
occupation grid 0, 0.1, ..., 1.2 is a choice of this package.
"""
from __future__ import annotations

import hashlib
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .core import PAPER_OMEGA_A, SystemParams, UnitSystem, temperature_for_occupation
from .dissipation import thermal_occupation
from .dynamics import log_time_grid
from .io import correlation_block, correlation_csv
from .simulate import simulate
from .spectral import solve

NBAR_GRID = tuple(round(0.1 * i, 1) for i in range(13))
OCCUPATION_KEYS = ("nbar1", "nbar2", "nbar3")
TEMPERATURE_KEYS = ("T1", "T2", "T3")
LATE_TIME = UnitSystem().seconds_to_gamma_t(1.0)


@dataclass(frozen=True)
class TimeSpec:
    lo: float = 1e-2
    hi: float = 1e7
    per_decade: int = 60

    def grid(self) -> np.ndarray:
        return log_time_grid(self.lo, self.hi, self.per_decade)

    @classmethod
    def parse(cls, text: str) -> "TimeSpec":
        lo, hi, ppd = text.split(",")
        return cls(float(lo), float(hi), int(ppd))


@dataclass(frozen=True)
class Scenario:
    """A named figure: base parameters plus a list of bath settings.

    ``points`` are (bath 1, bath 2, bath 3) triples, occupations at Omega_5
    unless ``raw_temperatures`` is set.  ``inset_points`` evaluated at
    ``inset_time`` go to a companion ``<name>_inset.csv``.
    """

    name: str
    params: SystemParams
    points: tuple[tuple[float, float, float], ...]
    description: str = ""
    raw_temperatures: bool = False
    times: TimeSpec = field(default_factory=TimeSpec)
    columns: tuple[str, ...] = ("C", "E", "QD", "CC", "I", "P000")
    inset_points: tuple[tuple[float, float, float], ...] = ()
    inset_time: float = LATE_TIME

    @property
    def asymmetric(self) -> bool:
        return any(p[0] != p[1] for p in self.points)

    def temperatures(self, point: Sequence[float]) -> tuple[float, float, float]:
        if self.raw_temperatures:
            return tuple(float(v) for v in point)
        omega5 = solve(self.params).bohr(6, 5)
        return tuple(0.0 if n == 0 else temperature_for_occupation(n, omega5) for n in point)

    def with_occupation(self, nbar: float) -> "Scenario":
        """Collapse the sweep to one point, keeping which baths are heated."""
        heated = [any(p[j] > 0 for p in self.points) for j in range(3)]
        if not any(heated):
            heated = [True, True, True]
        point = tuple(nbar if h else 0.0 for h in heated)
        return replace(self, points=(point,), raw_temperatures=False, inset_points=())

    def with_temperatures(self, temps: Sequence[float]) -> "Scenario":
        return replace(self, points=(tuple(temps),), raw_temperatures=True, inset_points=())


def _paper(delta_fraction: float = 0.1, **overrides) -> SystemParams:
    return SystemParams(delta=delta_fraction * PAPER_OMEGA_A, **overrides)


def _equal(grid=NBAR_GRID):
    return tuple((n, n, n) for n in grid)


BUILTIN: dict[str, Scenario] = {
    s.name: s for s in (
        Scenario("fig2a", _paper(0.0), _equal(), "equal bath temperatures, zero detuning"),
        Scenario("fig2b", _paper(1e-4), _equal(), "equal bath temperatures, delta = 1e-4 omega_a"),
        Scenario("fig2c", _paper(0.1), _equal(), "equal bath temperatures, delta = 0.1 omega_a"),
        Scenario("fig3", _paper(0.1, nu=100.0), _equal(), "g = 5, nu = 100, delta = 0.1 omega_a"),
        Scenario("fig4a", _paper(0.1), tuple((0.0, 0.0, n) for n in NBAR_GRID),
                 "cavity baths cold, fiber bath swept"),
        Scenario("fig4b", _paper(0.1), tuple((n, n, 0.0) for n in NBAR_GRID),
                 "fiber bath cold, both cavity baths swept together"),
        Scenario("fig4c", _paper(0.1),
                 ((0.2, 0.5, 1.0), (1.0, 0.5, 0.2), (0.5, 0.2, 1.0), (1.0, 1.0, 0.5),
                  (0.2, 1.0, 0.5), (0.5, 0.5, 1.2)),
                 "all three baths at different temperatures"),
        Scenario("fig5", _paper(0.1), ((1.0, 1.0, 1.0),),
                 "discord, entanglement of formation and classical correlation at one thermal photon",
                 columns=("E", "QD", "CC"), inset_points=_equal()),
        Scenario("fig6a", _paper(0.1), _equal(), "vacuum probability, equal bath temperatures",
                 columns=("P000",)),
        Scenario("fig6b", _paper(0.1), tuple((0.0, 0.0, n) for n in NBAR_GRID),
                 "vacuum probability, only the fiber bath heated", columns=("P000",)),
    )
}


class UnknownScenario(KeyError):
    pass


def get_scenario(name: str) -> Scenario:
    try:
        return BUILTIN[name]
    except KeyError:
        raise UnknownScenario(name) from None


def _run_point(params: SystemParams, times: np.ndarray) -> dict:
    return simulate(params, times).table


def _map(jobs: Sequence[tuple[SystemParams, np.ndarray]], workers: int) -> list[dict]:
    if workers <= 1 or len(jobs) <= 1:
        return [_run_point(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, *zip(*jobs)))


def params_hash(params: Sequence[SystemParams]) -> str:
    h = hashlib.sha256()
    for p in params:
        h.update(repr(sorted(p.as_dict().items())).encode())
    return h.hexdigest()[:16]


@dataclass
class SweepResult:
    """Long-form records plus the rendered CSV text (and optional inset CSV)."""

    prefix_names: tuple[str, ...]
    prefixes: list[tuple[float, ...]]
    times: list[np.ndarray]
    tables: list[dict]
    extra_columns: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)
    inset: "SweepResult | None" = None

    def csv(self) -> str:
        blocks = [correlation_block(pre, t, tab, self.extra_columns)
                  for pre, t, tab in zip(self.prefixes, self.times, self.tables)]
        return correlation_csv(self.prefix_names, blocks, self.extra_columns)

    def records(self):
        """Iterate ``(prefix, gamma_t, {column: value})`` in output order."""
        for pre, times, tab in zip(self.prefixes, self.times, self.tables):
            for i, t in enumerate(times):
                yield pre, float(t), {k: float(v[i]) for k, v in tab.items()}


def run_scenario(scenario: Scenario, times: TimeSpec | None = None, workers: int = 1) -> SweepResult:
    spec = times or scenario.times
    grid = spec.grid()
    settings = [scenario.temperatures(p) for p in scenario.points]
    jobs = [(scenario.params.with_temperatures(*T), grid) for T in settings]
    tables = _map(jobs, workers)
    prefix_names = OCCUPATION_KEYS + TEMPERATURE_KEYS
    prefixes = [_prefix(scenario, p, T) for p, T in zip(scenario.points, settings)]
    extra = ("QD_A",) if any(T[0] != T[1] for T in settings) else ()
    result = SweepResult(prefix_names, prefixes, [grid] * len(jobs), tables, extra,
                         {"scenario": scenario.name, "params_hash": params_hash([j[0] for j in jobs]),
                          "version": __version__})
    if scenario.inset_points:
        late = np.array([scenario.inset_time])
        inset_settings = [scenario.temperatures(p) for p in scenario.inset_points]
        inset_jobs = [(scenario.params.with_temperatures(*T), late) for T in inset_settings]
        result.inset = SweepResult(
            prefix_names,
            [_prefix(scenario, p, T) for p, T in zip(scenario.inset_points, inset_settings)],
            [late] * len(inset_jobs), _map(inset_jobs, workers),
            metadata={"scenario": scenario.name + "_inset"},
        )
    return result


def _prefix(scenario: Scenario, point, temps) -> tuple[float, ...]:
    if scenario.raw_temperatures:
        omega5 = solve(scenario.params).bohr(6, 5)
        occ = tuple(thermal_occupation(omega5, T) for T in temps)
    else:
        occ = tuple(point)
    return (*occ, *temps)


SWEEPABLE = tuple(f for f in SystemParams.__dataclass_fields__ if f != "delta_sign") + OCCUPATION_KEYS + ("nbar",)


class SweepError(ValueError):
    pass


def parse_vary(items: Sequence[str]) -> dict[str, list[float]]:
    """``["T3=0,3e6,6e6", ...]`` -> ordered mapping of key to values."""
    vary: dict[str, list[float]] = {}
    for item in items:
        if "=" not in item:
            raise SweepError(f"expected key=v1,v2,... got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in SWEEPABLE:
            raise SweepError(f"unknown sweep key {key!r}")
        values = [float(v) for v in raw.split(",") if v.strip()]
        vary[key] = values
    return vary


def _apply(params: SystemParams, assignment: Mapping[str, float]) -> SystemParams:
    fields = {k: v for k, v in assignment.items() if k in SystemParams.__dataclass_fields__}
    params = replace(params, **fields)
    occupations = {k: v for k, v in assignment.items() if k not in fields}
    if occupations:
        omega5 = solve(params).bohr(6, 5)
        temps = dict(T1=params.T1, T2=params.T2, T3=params.T3)
        for key, n in occupations.items():
            T = 0.0 if n == 0 else temperature_for_occupation(n, omega5)
            targets = TEMPERATURE_KEYS if key == "nbar" else ("T" + key[-1],)
            for t in targets:
                temps[t] = T
        params = replace(params, **temps)
    return params


def sweep_points(params: SystemParams, vary: Mapping[str, Sequence[float]]):
    """Cartesian product over ``vary`` as ``[(combo, params), ...]`` in output order."""
    keys = list(vary)
    if any(len(vary[k]) == 0 for k in keys):
        raise SweepError("empty sweep product")
    combos = list(itertools.product(*(vary[k] for k in keys)))
    return [(tuple(c), _apply(params, dict(zip(keys, c)))) for c in combos]


def sweep(params: SystemParams, vary: Mapping[str, Sequence[float]], times: TimeSpec | None = None,
          workers: int = 1) -> SweepResult:
    """Cartesian product over ``vary``; prefix columns are the varied keys in order."""
    points = sweep_points(params, vary)
    grid = (times or TimeSpec()).grid()
    jobs = [(p, grid) for _, p in points]
    tables = _map(jobs, workers)
    return SweepResult(tuple(vary), [c for c, _ in points], [grid] * len(jobs), tables,
                       metadata={"params_hash": params_hash([p for _, p in points]),
                                 "version": __version__})

"""Parameter container, unit bookkeeping and temperature/occupation conversions.

Everything inside the package is expressed in units of the damping rate
``gamma`` (gamma1 = gamma2 = gamma3 = 1 by default) with hbar = k_B = 1, so a
temperature is an energy and a frequency is a rate.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

PARAM_KEYS = (
    "omega_a", "delta", "g1", "g2", "nu",
    "gamma1", "gamma2", "gamma3", "T1", "T2", "T3",
)
OPTIONAL_KEYS = ("nbar_target", "delta_sign")

PAPER_OMEGA_A = 4.0e6
PAPER_COUPLING = 5.0


class ParameterError(ValueError):
    """Raised when a parameter file or a derived quantity is malformed."""


@dataclass(frozen=True)
class SystemParams:
    """Couplings, frequencies, damping rates and bath temperatures.

    ``delta_sign`` selects the detuning convention: +1 means
    ``omega_0 = omega_a - delta`` (cavities red-detuned for delta > 0),
    -1 flips it to ``omega_0 = omega_a + delta``.
    """

    omega_a: float = PAPER_OMEGA_A
    delta: float = 0.1 * PAPER_OMEGA_A
    g1: float = PAPER_COUPLING
    g2: float = PAPER_COUPLING
    nu: float = PAPER_COUPLING
    gamma1: float = 1.0
    gamma2: float = 1.0
    gamma3: float = 1.0
    T1: float = 0.0
    T2: float = 0.0
    T3: float = 0.0
    delta_sign: int = 1

    @property
    def omega_0(self) -> float:
        return self.omega_a - self.delta_sign * self.delta

    @property
    def gammas(self) -> tuple[float, float, float]:
        """Damping rates ordered (cavity 1, fiber, cavity 2)."""
        return (self.gamma1, self.gamma3, self.gamma2)

    @property
    def temperatures(self) -> tuple[float, float, float]:
        """Bath temperatures ordered (cavity 1, fiber, cavity 2)."""
        return (self.T1, self.T3, self.T2)

    def with_temperatures(self, T1: float, T2: float, T3: float) -> "SystemParams":
        return replace(self, T1=T1, T2=T2, T3=T3)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class UnitSystem:
    """Conversion between gamma units and SI at the CLI boundary."""

    gamma_hz: float = 2.0 * math.pi * 1.0e6

    def __post_init__(self):
        if not self.gamma_hz > 0:
            raise ParameterError("gamma_hz must be positive")

    def seconds_to_gamma_t(self, seconds: float) -> float:
        return seconds * self.gamma_hz

    def gamma_t_to_seconds(self, gamma_t: float) -> float:
        return gamma_t / self.gamma_hz


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return not self.problems

    @property
    def ok(self) -> bool:
        return not self.problems


def validate(params: SystemParams) -> ValidationReport:
    """Collect every violated invariant of ``params`` without raising."""
    problems = []
    for key in PARAM_KEYS:
        value = getattr(params, key)
        if not math.isfinite(value):
            problems.append(f"non-finite value for {key}")
    if not params.omega_a > 0:
        problems.append("omega_a must be positive")
    for key in ("g1", "g2", "nu"):
        if getattr(params, key) < 0:
            problems.append(f"negative coupling {key}")
    for key in ("gamma1", "gamma2", "gamma3"):
        if getattr(params, key) < 0:
            problems.append(f"negative damping rate {key}")
    for key in ("T1", "T2", "T3"):
        if getattr(params, key) < 0:
            problems.append(f"negative temperature {key}")
    if params.delta_sign not in (1, -1):
        problems.append("delta_sign must be +1 or -1")
    return ValidationReport(tuple(problems))


def temperature_for_occupation(nbar: float, omega: float) -> float:
    """Invert the Bose-Einstein occupation: T such that n(omega, T) = nbar."""
    if not nbar > 0:
        raise ParameterError("occupation must be positive")
    if not omega > 0:
        raise ParameterError("positive Bohr frequency required")
    return omega / math.log1p(1.0 / nbar)


def _parse_value(key: str, raw: str, lineno: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParameterError(f"line {lineno}: cannot parse {key}={raw!r}") from None


def parse_param_text(text: str) -> tuple[dict[str, float], float | None]:
    """Parse ``key=value`` lines; returns (fields, nbar_target)."""
    values: dict[str, float] = {}
    nbar_target = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_KEYS and key not in OPTIONAL_KEYS:
            raise ParameterError(f"line {lineno}: unknown key {key!r}")
        value = _parse_value(key, raw, lineno)
        if key == "nbar_target":
            nbar_target = value
        elif key == "delta_sign":
            values[key] = int(value)
        else:
            values[key] = value
    return values, nbar_target


def load_params(path: str | Path) -> SystemParams:
    """Read a parameter file; ``nbar_target`` sets all three temperatures."""
    values, nbar_target = parse_param_text(Path(path).read_text(encoding="utf-8"))
    return params_from_mapping(values, nbar_target)


def params_from_mapping(values: Mapping[str, float], nbar_target: float | None = None) -> SystemParams:
    params = SystemParams(**values)
    if nbar_target is not None:
        params = with_equal_occupation(params, nbar_target)
    return params


def with_equal_occupation(params: SystemParams, nbar: float) -> SystemParams:
    T = occupation_temperature(params, nbar)
    return params.with_temperatures(T, T, T)


def occupation_temperature(params: SystemParams, nbar: float) -> float:
    """Temperature giving occupation ``nbar`` at the lowest excited dressed level.

    ``nbar == 0`` maps to T = 0.
    """
    if nbar == 0:
        return 0.0
    # local import: spectral depends on this module
    from .spectral import build_hamiltonian, eigensystem

    dressed = eigensystem(build_hamiltonian(params))
    return temperature_for_occupation(nbar, dressed.bohr(6, 5))


def format_params(params: SystemParams, keys: Iterable[str] = PARAM_KEYS) -> str:
    lines = [f"{key}={getattr(params, key)!r}" for key in keys]
    if params.delta_sign != 1:
        lines.append(f"delta_sign={params.delta_sign}")
    return "\n".join(lines) + "\n"

"""CSV and binary writers shared by the command line front end."""
from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dissipation import TransitionRates
from .dynamics import Trajectory
from .spectral import GROUND, N_STATES, DressedBasis

CORRELATION_HEADER = ("gamma_t", "C", "E", "QD", "CC", "I", "P000")
SPECTRUM_HEADER = ("k", "Omega_k") + tuple(f"c_{j}k" for j in range(1, N_STATES + 1))
RATES_HEADER = ("k", "Omega_k", "down_k", "up_k", "w_c1", "w_fib", "w_c2")
TRAJECTORY_HEADER = ("gamma_t",) + tuple(f"rho{k}{k}" for k in range(1, N_STATES + 1))


def fmt(value: float) -> str:
    """12 significant digits, stable across platforms."""
    value = float(value)
    if value == 0.0:
        return "0"
    return f"{value:.12g}"


def _line(values: Iterable) -> str:
    return ",".join(v if isinstance(v, str) else fmt(v) for v in values) + "\n"


def correlation_block(prefix: Sequence[float], times: np.ndarray, table: dict,
                      extra: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    columns = [table[name] for name in CORRELATION_HEADER[1:]] + [table[name] for name in extra]
    for i, t in enumerate(times):
        buf.write(_line([*prefix, t, *(col[i] for col in columns)]))
    return buf.getvalue()


def correlation_csv(prefix_names: Sequence[str], blocks: Sequence[str],
                    extra: Sequence[str] = ()) -> str:
    """Header plus blank-line separated blocks (one per sweep point)."""
    header = _line([*prefix_names, *CORRELATION_HEADER, *extra])
    return header + "\n".join(blocks)


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def spectrum_csv(dressed: DressedBasis) -> str:
    rows = [_line(SPECTRUM_HEADER)]
    for k in range(N_STATES):
        rows.append(_line([str(k + 1), dressed.omega[k], *dressed.C[:, k]]))
    return "".join(rows)


def rates_rows(dressed: DressedBasis, rates: TransitionRates, prefix: Sequence[float] = ()) -> str:
    rows = []
    for k in range(GROUND):
        rows.append(_line([*prefix, str(k + 1), dressed.omega[k], rates.down[k], rates.up[k],
                           *rates.weights[:, k]]))
    return "".join(rows)


def rates_csv(dressed: DressedBasis, rates: TransitionRates) -> str:
    return _line(RATES_HEADER) + rates_rows(dressed, rates)


def trajectory_csv(traj: Trajectory) -> str:
    pops = traj.populations
    rows = [_line(TRAJECTORY_HEADER)]
    for t, p in zip(traj.times, pops):
        rows.append(_line([t, *p]))
    return "".join(rows)


def write_trajectory_binary(path: str | Path, traj: Trajectory) -> Path:
    """Row-major little-endian float64 dump: per sample, 36 real parts then 36 imaginary parts."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    states = traj.states.reshape(len(traj), -1)
    data = np.concatenate([states.real, states.imag], axis=1).astype("<f8")
    data.tofile(path)
    return path


def read_trajectory_binary(path: str | Path) -> np.ndarray:
    data = np.fromfile(path, dtype="<f8").reshape(-1, 2 * N_STATES * N_STATES)
    half = N_STATES * N_STATES
    return (data[:, :half] + 1j * data[:, half:]).reshape(-1, N_STATES, N_STATES)


def read_correlation_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Parse a correlation CSV back into ``(header, rows)``; blank separators skipped."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:] if line.strip()]
    return header, np.array(rows)

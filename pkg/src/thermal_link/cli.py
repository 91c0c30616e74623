"""``thermal-link`` command line interface.

Exit codes: 0 ok, 2 usage, 3 validation, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .core import ParameterError, SystemParams, load_params, validate
from .dissipation import rwa_check, transition_rates
from .dynamics import DensityMatrix, propagate
from .io import (RATES_HEADER, rates_csv, rates_rows, spectrum_csv, trajectory_csv,
                 write_text, write_trajectory_binary)
from .oracle import build_generator, expm_propagate
from .scenarios import (BUILTIN, OCCUPATION_KEYS, TEMPERATURE_KEYS, SweepError, TimeSpec,
                        UnknownScenario, get_scenario, parse_vary, run_scenario, sweep,
                        sweep_points)
from .spectral import solve

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermal-link", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="reproduce a figure scenario as CSV")
    run.add_argument("scenario", help="built-in name: " + ", ".join(BUILTIN))
    run.add_argument("--out", default=".", help="output directory")
    group = run.add_mutually_exclusive_group()
    group.add_argument("--nbar", type=float, help="single occupation for the heated baths")
    group.add_argument("--temps", help="T1,T2,T3 in gamma units")
    _common(run)

    sw = sub.add_parser("sweep", help="Cartesian parameter sweep from a parameter file")
    sw.add_argument("params", help="key=value parameter file")
    sw.add_argument("--vary", action="append", default=[], metavar="KEY=V1,V2,...")
    sw.add_argument("--out", default="sweep.csv", help="output CSV path")
    _common(sw)

    diag = sub.add_parser("diagnose", help="print spectrum, rates and consistency checks")
    diag.add_argument("params", nargs="?", help="key=value parameter file (default: paper values)")
    diag.add_argument("--dump-trajectory", metavar="PATH", help="dressed populations CSV")
    diag.add_argument("--dump-binary", metavar="PATH", help="full density matrices, float64 LE")
    diag.add_argument("--dump-spectrum", metavar="PATH")
    diag.add_argument("--dump-rates", metavar="PATH")
    diag.add_argument("--times", type=TimeSpec.parse, default=TimeSpec(), help="lo,hi,per_decade")
    return parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--times", type=TimeSpec.parse, default=None, help="lo,hi,per_decade of gamma*t")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump-spectrum", metavar="PATH")
    p.add_argument("--dump-rates", metavar="PATH")


def _dump_point_files(args, params_list, prefixes, prefix_names) -> None:
    if args.dump_spectrum:
        write_text(args.dump_spectrum, spectrum_csv(solve(params_list[0])))
    if args.dump_rates:
        rows = [",".join((*prefix_names, *RATES_HEADER)) + "\n"]
        for params, pre in zip(params_list, prefixes):
            dressed = solve(params)
            rows.append(rates_rows(dressed, transition_rates(dressed, params), pre))
        write_text(args.dump_rates, "".join(rows))


def cmd_run(args) -> int:
    try:
        scenario = get_scenario(args.scenario)
    except UnknownScenario:
        print(f"unknown scenario {args.scenario!r}; known: {', '.join(BUILTIN)}", file=sys.stderr)
        return EXIT_USAGE
    if args.nbar is not None:
        if args.nbar < 0:
            print("occupation must be non-negative", file=sys.stderr)
            return EXIT_VALIDATION
        scenario = scenario.with_occupation(args.nbar)
    elif args.temps:
        temps = [float(v) for v in args.temps.split(",")]
        if len(temps) != 3:
            print("--temps needs three comma-separated values", file=sys.stderr)
            return EXIT_USAGE
        scenario = scenario.with_temperatures(temps)
    params_list = [scenario.params.with_temperatures(*scenario.temperatures(p)) for p in scenario.points]
    for params in params_list:
        report = validate(params)
        if not report.ok:
            print("invalid parameters: " + "; ".join(report.problems), file=sys.stderr)
            return EXIT_VALIDATION
    result = run_scenario(scenario, args.times, args.workers)
    out = Path(args.out)
    path = write_text(out / f"{scenario.name}.csv", result.csv())
    print(path)
    if result.inset is not None:
        print(write_text(out / f"{scenario.name}_inset.csv", result.inset.csv()))
    _dump_point_files(args, params_list, result.prefixes, OCCUPATION_KEYS + TEMPERATURE_KEYS)
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = load_params(args.params)
    report = validate(params)
    if not report.ok:
        print("invalid parameters: " + "; ".join(report.problems), file=sys.stderr)
        return EXIT_VALIDATION
    try:
        vary = parse_vary(args.vary)
    except (SweepError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if any(len(v) == 0 for v in vary.values()):
        print("empty sweep product", file=sys.stderr)
        return EXIT_VALIDATION
    result = sweep(params, vary, args.times, args.workers)
    print(write_text(args.out, result.csv()))
    params_list = [p for _, p in sweep_points(params, vary)]
    _dump_point_files(args, params_list, result.prefixes, tuple(vary))
    return EXIT_OK


def _steady_populations(rates) -> np.ndarray | None:
    if not np.any(rates.down > 0):
        return None
    ratio = np.where(rates.down > 0, rates.up / np.where(rates.down > 0, rates.down, 1.0), 0.0)
    p = np.append(ratio, 1.0)
    return p / p.sum()


def cmd_diagnose(args) -> int:
    params = load_params(args.params) if args.params else SystemParams()
    report = validate(params)
    if not report.ok:
        print("invalid parameters: " + "; ".join(report.problems), file=sys.stderr)
        return EXIT_VALIDATION
    dressed = solve(params)
    rates = transition_rates(dressed, params)
    print("# spectrum (gamma units)")
    for k in range(6):
        print(f"Omega_{k + 1} = {float(dressed.omega[k])!r}")
    for warning in dressed.warnings:
        print(f"warning: {warning}")
    print("# rates")
    print(rates_csv(dressed, rates), end="")
    check = rwa_check(dressed, rates, params)
    print(f"# rwa ratio 2g/gamma_max = {check.ratio:.6g} (thermal {check.thermal_ratio:.6g})")
    for warning in check.warnings:
        print(f"warning: {warning}")
    print("# KMS ratios up/down per level")
    for k in range(5):
        ratio = rates.up[k] / rates.down[k] if rates.down[k] > 0 else math.nan
        print(f"level {k + 1}: {ratio:.12g}")
    steady = _steady_populations(rates)
    if steady is None:
        print("# steady state: none (unitary)")
    else:
        print("# steady state populations: " + ", ".join(f"{p:.12g}" for p in steady))
    times = np.logspace(-2, 2, 9)
    traj = propagate(DensityMatrix.ground(), dressed, rates, times)
    gen = build_generator(dressed, rates)
    residual = max(float(np.abs(expm_propagate(gen, DensityMatrix.ground().matrix, t) - traj.states[i]).max())
                   for i, t in enumerate(times))
    print(f"# oracle residual (max abs, gamma t in [1e-2, 1e2]) = {residual:.3e}")
    if args.dump_spectrum:
        write_text(args.dump_spectrum, spectrum_csv(dressed))
    if args.dump_rates:
        write_text(args.dump_rates, rates_csv(dressed, rates))
    if args.dump_trajectory or args.dump_binary:
        full = propagate(DensityMatrix.ground(), dressed, rates, args.times.grid())
        if args.dump_trajectory:
            write_text(args.dump_trajectory, trajectory_csv(full))
        if args.dump_binary:
            write_trajectory_binary(args.dump_binary, full)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "sweep": cmd_sweep, "diagnose": cmd_diagnose}[args.command]
    try:
        return handler(args)
    except (ParameterError, SweepError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: run one config, emit trajectory and report.

Usage:

    chartprop run CONFIG [--samples N] [--compare-oracle]
                  [--format csv|json] [--output PATH]
                  [--rel-tol X] [--abs-tol X]

The trajectory table goes to --output (default: standard output); the
run report goes to standard error as `key = value` lines, so piping
the table stays clean. Exit codes: 0 success, 1 config or IO trouble,
2 chart singularity (the math ran off the coordinate chart; the rows
up to the blow-up are still written).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import three_level, two_level
from .drives import ConfigError, config_to_dict, parse_config
from .integrate import IntegrationError, IntegratorSettings, integrate
from .reference import (compare, integrate_schrodinger, schrodinger_residuals,
                        unitarity_errors)


@dataclass(frozen=True)
class RunRequest:
    """One CLI invocation's worth of work."""

    config_path: str
    samples: int = 200
    compare_oracle: bool = False
    output_format: str = "csv"
    output_path: Optional[str] = None   # None means standard output
    rel_tol: Optional[float] = None     # None means use the config value
    abs_tol: Optional[float] = None

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.output_format!r}")


@dataclass(frozen=True)
class RunReport:
    """Summary numbers for one run; all residuals are non-negative."""

    status: str
    max_unitarity_error: float
    max_schrodinger_residual: float
    singularity_time: Optional[float] = None
    max_delta1_residual: Optional[float] = None
    max_delta2_residual: Optional[float] = None
    max_frobenius_error: Optional[float] = None
    time_of_max_error: Optional[float] = None
    oracle_unitarity_drift: Optional[float] = None
    wall_time_s: Optional[float] = None

    def as_lines(self) -> list:
        def fmt(v):
            return f"{v:.17g}" if isinstance(v, float) else str(v)
        keys = ("status", "singularity_time", "max_unitarity_error",
                "max_schrodinger_residual", "max_delta1_residual",
                "max_delta2_residual", "max_frobenius_error",
                "time_of_max_error", "oracle_unitarity_drift", "wall_time_s")
        return [f"{k} = {fmt(getattr(self, k))}"
                for k in keys if getattr(self, k) is not None]


def _chart_module(system):
    return two_level if system == 2 else three_level


def _initial_vector(system):
    if system == 2:
        return two_level.pack_state(two_level.initial_state2())
    return three_level.pack_state(three_level.initial_state3())


_U_COLUMNS = {
    2: [f"u{i}{j}_{p}" for i in (1, 2) for j in (1, 2) for p in ("re", "im")],
    3: [f"u{i}{j}_{p}" for i in (1, 2, 3) for j in (1, 2, 3) for p in ("re", "im")],
}


def trajectory_table(trajectory, unitaries, ham) -> tuple:
    """Column names and a (samples x columns) float matrix for emission."""
    times = trajectory.times
    states = trajectory.states
    system = ham.dim

    columns = ["t"]
    blocks = [times[:, None]]
    if system == 2:
        z, phi = two_level.coords_from_states(states)
        columns += ["re_z", "im_z", "phi"]
        blocks.append(np.column_stack([z.real, z.imag, phi]))
    else:
        x, y, z, phi1, phi2 = three_level.coords_from_states(states)
        columns += ["re_x", "im_x", "re_y", "im_y", "re_z", "im_z",
                    "phi1", "phi2", "phi3"]
        blocks.append(np.column_stack([x.real, x.imag, y.real, y.imag,
                                       z.real, z.imag, phi1, phi2,
                                       -(phi1 + phi2)]))

    columns += _U_COLUMNS[system]
    flat = unitaries.reshape(len(times), system * system)
    interleaved = np.empty((len(times), 2 * system * system))
    interleaved[:, 0::2] = flat.real
    interleaved[:, 1::2] = flat.imag
    blocks.append(interleaved)

    columns.append("residual_schrodinger")
    blocks.append(schrodinger_residuals(times, unitaries, ham)[:, None])
    if system == 3:
        d1_res, d2_res = three_level.delta_residuals(times, states, ham)
        columns += ["residual_delta1", "residual_delta2"]
        blocks.append(np.column_stack([d1_res, d2_res]))

    return columns, np.hstack(blocks)


def _csv_text(columns, table) -> str:
    lines = [",".join(columns)]
    for row in table:
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _json_text(columns, table, config, settings, trajectory) -> str:
    header = {
        "system": config.system,
        "settings": {
            "rel_tol": settings.rel_tol,
            "abs_tol": settings.abs_tol,
            "max_step": settings.max_step,
            "initial_step": settings.initial_step,
            "max_steps": settings.max_steps,
        },
        "config": config_to_dict(config),
        "status": trajectory.status,
        "singularity_time": trajectory.singularity_time,
    }
    samples = [dict(zip(columns, (float(f"{v:.17g}") for v in row)))
               for row in table]
    return json.dumps({"header": header, "samples": samples}, indent=1) + "\n"


def emit_trajectory(trajectory, unitaries, config, settings, output_format,
                    stream) -> None:
    """Write the sampled trajectory (complete or partial) to a stream."""
    columns, table = trajectory_table(trajectory, unitaries, config.hamiltonian)
    if output_format == "csv":
        stream.write(_csv_text(columns, table))
    else:
        stream.write(_json_text(columns, table, config, settings, trajectory))


def _run_impl(request: RunRequest):
    started = time.perf_counter()
    with open(request.config_path, "r", encoding="utf-8") as fh:
        config = parse_config(fh)

    rel_tol = config.rel_tol if request.rel_tol is None else request.rel_tol
    abs_tol = config.abs_tol if request.abs_tol is None else request.abs_tol
    settings = IntegratorSettings(max_step=config.max_step,
                                  rel_tol=rel_tol, abs_tol=abs_tol)
    module = _chart_module(config.system)
    grid = np.linspace(config.t_start, config.t_end, request.samples)

    trajectory = integrate(module.chart_rhs(config.hamiltonian),
                           _initial_vector(config.system),
                           config.t_start, config.t_end, settings, grid,
                           escape=module.escaped)

    unitaries = module.reconstruct_batch(trajectory.states)
    resid = schrodinger_residuals(trajectory.times, unitaries,
                                  config.hamiltonian)
    report_fields = {
        "status": trajectory.status,
        "singularity_time": trajectory.singularity_time,
        "max_unitarity_error": float(np.max(unitarity_errors(unitaries))),
        "max_schrodinger_residual": float(np.max(resid)),
    }
    if config.system == 3:
        d1_res, d2_res = three_level.delta_residuals(
            trajectory.times, trajectory.states, config.hamiltonian)
        report_fields["max_delta1_residual"] = float(np.max(d1_res))
        report_fields["max_delta2_residual"] = float(np.max(d2_res))

    if request.compare_oracle and len(trajectory.times) >= 2:
        oracle = integrate_schrodinger(config.hamiltonian,
                                       trajectory.times[0],
                                       trajectory.times[-1],
                                       settings, trajectory.times)
        oracle_report = compare(trajectory.times, unitaries, oracle)
        report_fields["max_frobenius_error"] = oracle_report.max_frobenius_error
        report_fields["time_of_max_error"] = oracle_report.time_of_max
        report_fields["oracle_unitarity_drift"] = oracle_report.oracle_drift

    if request.output_path is None:
        emit_trajectory(trajectory, unitaries, config, settings,
                        request.output_format, sys.stdout)
    else:
        with open(request.output_path, "w", encoding="utf-8") as fh:
            emit_trajectory(trajectory, unitaries, config, settings,
                            request.output_format, fh)

    report_fields["wall_time_s"] = time.perf_counter() - started
    report = RunReport(**report_fields)
    code = 2 if trajectory.status == "singularity" else 0
    return code, report


def run(request: RunRequest) -> int:
    """Execute one run request; returns the process exit code."""
    try:
        code, report = _run_impl(request)
    except (ConfigError, OSError, IntegrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if report.status == "singularity":
        print(f"chart singularity near t = {report.singularity_time:.12g}; "
              f"trajectory truncated", file=sys.stderr)
    for line in report.as_lines():
        print(line, file=sys.stderr)
    return code


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; code 2 here is
    # reserved for chart singularities, so route errors to code 1.
    def error(self, message):
        raise _CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chartprop",
                     description="Propagate driven 2- and 3-level evolution "
                                 "operators in chart coordinates.")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="integrate one config and emit the "
                                      "trajectory")
    runp.add_argument("config", help="path to a YAML/JSON run config")
    runp.add_argument("--samples", type=int, default=200,
                      help="uniform output grid size (default 200)")
    runp.add_argument("--compare-oracle", action="store_true",
                      help="also integrate i dU/dt = HU directly and report "
                           "the difference")
    runp.add_argument("--format", choices=("csv", "json"), default="csv",
                      help="trajectory file format (default csv)")
    runp.add_argument("--output", default=None, metavar="PATH",
                      help="trajectory file path (default: standard output)")
    runp.add_argument("--rel-tol", type=float, default=None, metavar="X",
                      help="override the config's relative tolerance")
    runp.add_argument("--abs-tol", type=float, default=None, metavar="X",
                      help="override the config's absolute tolerance")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        request = RunRequest(config_path=args.config,
                             samples=args.samples,
                             compare_oracle=args.compare_oracle,
                             output_format=args.format,
                             output_path=args.output,
                             rel_tol=args.rel_tol,
                             abs_tol=args.abs_tol)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(request)

"""
Command line runner.

Usage::

    degenheat <mode> --config experiment.json [--out prefix] [--log-level INFO]

``mode`` is one of ``solve``, ``limit``, ``stationary``, ``sweep``, ``decay``
and ``check`` and must match the ``mode`` of the config file. Everything is
computed before the first file is written; a failed run writes nothing.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .config import MODES, ExperimentConfig, load_config
from .diagnostics import ERROR_DROP_TARGET, MASS_DROP_TARGET, DiagnosticsManager, EnergyReport
from .exceptions import DegenHeatError, UsageError, exit_code_for
from .grid import Grid, Trajectory
from .parabolic import ParabolicSolver
from .stationary import StationarySolver
from .utils import Utility

logger = logging.getLogger(__name__)

AXIS_NAMES = ("x", "y")


@dataclass
class RunResult:
    """Frames to write, keyed by file suffix, and the summary lines to print."""

    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: List[str] = field(default_factory=list)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degenheat",
        description="Penalized heat equation solvers and estimate checks",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run a '{mode}' experiment")
        p.add_argument("--config", required=True, help="experiment JSON file")
        p.add_argument("--out", default=None, help="output path prefix (overrides the config)")
        p.add_argument(
            "--log-level",
            default="WARNING",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
            help="logging level (default: WARNING)",
        )
    return parser


# ---------------------------------------------------------------------
# Frames
# ---------------------------------------------------------------------


def _node_columns(grid: Grid) -> Dict[str, np.ndarray]:
    nodes = grid.coordinates()
    return {AXIS_NAMES[axis]: nodes[:, axis] for axis in range(grid.dimension)}


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Rows ``t, x[, y], u`` ordered by time level, then node index."""
    grid, layers = trajectory.grid, trajectory.layers
    columns = {"t": np.repeat(trajectory.time_grid.times(), grid.size)}
    for name, values in _node_columns(grid).items():
        columns[name] = np.tile(values, layers.shape[0])
    columns["u"] = layers.ravel()
    return pd.DataFrame(columns)


def _report_lines(report: EnergyReport) -> List[str]:
    rows = [
        {"estimate": r.name, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio, "verdict": r.satisfied}
        for r in report.records
    ]
    return Utility.format_table(rows, ["estimate", "lhs", "rhs", "ratio", "verdict"]).splitlines()


# ---------------------------------------------------------------------
# Modes
# ---------------------------------------------------------------------


def _run_solve(config: ExperimentConfig, manager: DiagnosticsManager) -> RunResult:
    problem = config.build_problem()
    trajectory = ParabolicSolver(problem).solve_penalized()
    report = manager.check_energy_bounds(trajectory, problem, bounds=("bound2", "penalization_mass"))
    lines = [f"penalized solve, lambda={problem.penalty:g}"] + _report_lines(report)
    return RunResult({"trajectory": trajectory_frame(trajectory)}, lines)


def _run_limit(config: ExperimentConfig, manager: DiagnosticsManager) -> RunResult:
    problem = config.build_problem(penalty=0.0)
    trajectory = ParabolicSolver(problem).solve_limit()
    report = manager.check_energy_bounds(trajectory, problem, bounds=("energyInf",))
    lines = ["limit solve on the vanishing set"] + _report_lines(report)
    return RunResult({"trajectory": trajectory_frame(trajectory)}, lines)


def _run_check(config: ExperimentConfig, manager: DiagnosticsManager) -> RunResult:
    problem = config.build_problem()
    solver = ParabolicSolver(problem)
    requested = config.bounds
    if requested is None:
        penalized_bounds = None
        run_limit = True
        try:
            problem.check_hypotheses("limit")
        except DegenHeatError as err:
            logger.info(f"energyInf skipped: {err}")
            run_limit = False
    else:
        penalized_bounds = [b for b in requested if b != "energyInf"]
        run_limit = "energyInf" in requested

    records = []
    if penalized_bounds is None or penalized_bounds:
        trajectory = solver.solve_penalized()
        records.extend(manager.check_energy_bounds(trajectory, problem, penalized_bounds).records)
    if run_limit:
        limit = solver.solve_limit()
        records.extend(
            manager.check_energy_bounds(limit, problem.with_penalty(0.0), ("energyInf",)).records
        )
    report = EnergyReport(tuple(records), manager.tol_disc)
    verdict = "PASS" if report.all_satisfied else "FAIL"
    lines = [f"energy bounds, lambda={problem.penalty:g}, tol_disc={manager.tol_disc:g}"]
    lines += _report_lines(report) + [f"overall: {verdict}"]
    return RunResult({"report": report.to_frame()}, lines)


def _run_sweep(config: ExperimentConfig, manager: DiagnosticsManager) -> RunResult:
    problem = config.build_problem(penalty=0.0)
    report = manager.convergence_sweep(problem, config.penalties)
    rows = [
        {"lambda": r.penalty, "err_l2h1": r.err_l2h1, "err_supl2": r.err_supl2, "pen_mass": r.pen_mass}
        for r in report.records
    ]
    lines = ["strong convergence sweep"]
    lines += Utility.format_table(rows, ["lambda", "err_l2h1", "err_supl2", "pen_mass"]).splitlines()
    lines.append(f"err_l2h1 decreasing (one 1% inversion allowed): {'PASS' if report.is_decreasing() else 'FAIL'}")
    lines.append(f"fitted order of err_l2h1 in lambda: {report.error_order():.4g}")
    lines.append(
        f"err_l2h1 drop over the sweep: {report.error_drop:.3g} (target > {ERROR_DROP_TARGET:g}): "
        f"{'PASS' if report.error_drop > ERROR_DROP_TARGET else 'FAIL'}"
    )
    lines.append(
        f"penalization mass drop over the sweep: {report.mass_drop:.3g} (target > {MASS_DROP_TARGET:g}): "
        f"{'PASS' if report.mass_drop > MASS_DROP_TARGET else 'FAIL'}"
    )
    return RunResult({"sweep": report.to_frame()}, lines)


def _run_decay(config: ExperimentConfig, manager: DiagnosticsManager) -> RunResult:
    problem = config.build_problem(penalty=0.0)
    report = manager.decay_sweep(
        problem, config.penalties, config.epsilon, slack=config.tolerances.decay_slack
    )
    threshold = -0.8 * 2 * report.epsilon * np.sqrt(report.delta / 2)
    rows = [
        {"lambda": r.penalty, "I_eps": r.i_eps, "W": r.weighted, "scaled": r.scaled}
        for r in report.records
    ]
    lines = [f"exponential decay, epsilon={report.epsilon:g}, delta={report.delta:.6g}"]
    lines += Utility.format_table(rows, ["lambda", "I_eps", "W", "scaled"]).splitlines()
    lines.append(
        f"slope of log I(A_3eps) vs sqrt(lambda): {report.slope_fit:.6g} "
        f"(threshold {threshold:.6g}, residual {report.residual:.3g}): "
        f"{'PASS' if report.slope_fit <= threshold else 'FAIL'}"
    )
    lines.append(
        f"scaled quantity bounded (growth {report.fit_ratio:.3g} <= {report.slack:g}): "
        f"{'PASS' if report.bounded else 'FAIL'}"
    )
    lines.append(f"I_eps drop over the sweep: {report.i_eps_drop:.3g}")
    return RunResult({"decay": report.to_frame()}, lines)


def _run_stationary(config: ExperimentConfig, manager: DiagnosticsManager) -> RunResult:
    spec = config.build_stationary()
    solver = StationarySolver(spec)
    penalized = solver.solve_penalized()
    limit = solver.solve_limit()
    energy, objective = solver.energy(penalized)
    work = float(spec.grid.cell_volume * np.dot(spec.forcing, penalized.values))
    defect = abs(energy - work) / max(abs(work), np.finfo(float).tiny)

    columns = _node_columns(spec.grid)
    columns["u_penalized"] = penalized.values
    columns["u_limit"] = limit.values
    lines = [
        f"stationary problem, lambda={spec.penalty:g}",
        f"energy equality defect |E - int f u| / |int f u|: {defect:.3e}",
        f"alpha(lambda) = min of E - 2 int f u: {objective:.10g}",
        f"max |u_penalized - u_limit|: {np.max(np.abs(penalized.values - limit.values)):.6g}",
    ]
    return RunResult({"stationary": pd.DataFrame(columns)}, lines)


RUNNERS = {
    "solve": _run_solve,
    "limit": _run_limit,
    "check": _run_check,
    "sweep": _run_sweep,
    "decay": _run_decay,
    "stationary": _run_stationary,
}


def execute(config: ExperimentConfig) -> RunResult:
    """Compute every frame of a run without touching the filesystem."""
    manager = DiagnosticsManager(tol_disc=config.tolerances.disc)
    return RUNNERS[config.mode](config, manager)


def write_outputs(result: RunResult, prefix: str) -> List[Path]:
    return [
        Utility.write_csv(frame, f"{prefix}_{suffix}.csv") for suffix, frame in result.frames.items()
    ]


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, run the experiment and return the exit code.

    Returns
    -------
    int
        0 on success, 2 on configuration or contract errors, 3 when a solve
        fails to converge, 4 on geometry errors.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        if config.mode != args.mode:
            raise UsageError(f"Subcommand '{args.mode}' does not match config mode '{config.mode}'")
        result = execute(config)
        written = write_outputs(result, args.out or config.output)
    except DegenHeatError as err:
        print(f"error: {err}", file=sys.stderr)
        return exit_code_for(err)

    print("\n".join(result.summary))
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

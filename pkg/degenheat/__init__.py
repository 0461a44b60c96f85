from .exceptions import (
    ConfigurationError,
    ContractError,
    DegenHeatError,
    GeometryError,
    SolverConvergenceError,
    UsageError,
)
from .grid import Field, Grid, TimeGrid, Trajectory, build_grid, build_time_grid, discrete_norm
from .linalg import SparseOperator, cg_solve
from .potential import DecayGeometry, PotentialSpec, build_decay_geometry, eval_potential
from .sources import SourceSpec
from .parabolic import ParabolicSolver, ProblemSpec, solve_limit, solve_penalized
from .stationary import StationarySolver, StationarySpec
from .diagnostics import DiagnosticsManager, DecayReport, EnergyReport, SweepReport
from .config import ExperimentConfig, load_config
from .utils import Utility

__all__ = [
    "ConfigurationError",
    "ContractError",
    "DegenHeatError",
    "GeometryError",
    "SolverConvergenceError",
    "UsageError",
    "Field",
    "Grid",
    "TimeGrid",
    "Trajectory",
    "build_grid",
    "build_time_grid",
    "discrete_norm",
    "SparseOperator",
    "cg_solve",
    "DecayGeometry",
    "PotentialSpec",
    "build_decay_geometry",
    "eval_potential",
    "SourceSpec",
    "ParabolicSolver",
    "ProblemSpec",
    "solve_limit",
    "solve_penalized",
    "StationarySolver",
    "StationarySpec",
    "DiagnosticsManager",
    "DecayReport",
    "EnergyReport",
    "SweepReport",
    "ExperimentConfig",
    "load_config",
    "Utility",
]

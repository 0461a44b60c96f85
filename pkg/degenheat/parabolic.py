"""
Backward Euler time stepping for the penalized problem and the masked limit problem.

Penalized step, ``k = 1..m``::

    (I/dt + A + lambda * diag(a(., t_k))) u^k = f(., t_k) + u^{k-1}/dt

Limit step: the same heat step without the potential, posed only on the
nodes of ``Omega_a(t_k)``; every other node is held at 0.
"""

import inspect
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from .exceptions import ConfigurationError, ContractError, SolverConvergenceError, UsageError
from .grid import Field, Grid, TimeGrid, Trajectory, assemble_dirichlet_laplacian
from .linalg import DEFAULT_TOL, SparseOperator, add_diagonal, cg_solve
from .potential import PotentialSpec, active_masks, sample_potential, verify_potential
from .sources import SourceSpec

HYPOTHESIS_TARGETS = ("strong_convergence", "exponential_decay", "limit")


@dataclass(frozen=True)
class ProblemSpec:
    """
    Data of one parabolic run.

    Attributes
    ----------
    grid, time_grid : Grid, TimeGrid
        Discretization of the cylinder ``Q_T``.
    potential : PotentialSpec
        The degenerate potential ``a``.
    forcing : SourceSpec
        ``f``; when restricted it is zeroed outside ``O_a`` at every level.
    initial : SourceSpec
        ``g``; when restricted it is zeroed outside ``Omega_a(0)``.
    penalty : float
        ``lambda >= 0``.
    cg_tol, cg_maxiter
        Conjugate gradient settings for every implicit step.
    """

    grid: Grid
    time_grid: TimeGrid
    potential: PotentialSpec
    forcing: SourceSpec = field(default_factory=SourceSpec)
    initial: SourceSpec = field(default_factory=SourceSpec)
    penalty: float = 0.0
    cg_tol: float = DEFAULT_TOL
    cg_maxiter: Optional[int] = None

    def __post_init__(self):
        if not np.isfinite(self.penalty) or self.penalty < 0:
            raise ConfigurationError(f"lambda must be finite and non-negative, got {self.penalty}")
        if not 0 < self.cg_tol < 1:
            raise ConfigurationError(f"CG tolerance must lie in (0, 1), got {self.cg_tol}")

    def with_penalty(self, penalty: float) -> "ProblemSpec":
        return replace(self, penalty=float(penalty))

    def scaled_data(self, factor: float) -> "ProblemSpec":
        """The same problem with ``f`` and ``g`` multiplied by ``factor``."""
        return replace(
            self, forcing=self.forcing.scaled(factor), initial=self.initial.scaled(factor)
        )

    def potential_layers(self) -> np.ndarray:
        return sample_potential(self.potential, self.grid, self.time_grid)

    def active_layers(self) -> np.ndarray:
        return active_masks(self.potential, self.grid, self.time_grid)

    def forcing_layers(self) -> np.ndarray:
        """``f(x_i, t_k)``, shape ``(m + 1, grid.size)``."""
        layers = self.time_grid.step_count + 1
        if not self.forcing.restrict_to_zero_set:
            return np.tile(self.forcing.sample(self.grid), (layers, 1))
        masks = self.active_layers()
        return np.stack([self.forcing.sample(self.grid, mask) for mask in masks])

    def initial_values(self) -> np.ndarray:
        mask = None
        if self.initial.restrict_to_zero_set:
            mask = self.active_layers()[0]
        return self.initial.sample(self.grid, mask)

    def initial_field(self) -> Field:
        return Field(self.grid, self.initial_values())

    def check_hypotheses(self, target: str) -> None:
        """
        Raise ``ContractError`` if the data violate the hypotheses of ``target``.

        Parameters
        ----------
        target : str
            ``strong_convergence``: Assumption (A) holds and ``g`` vanishes
            where ``a(., 0) > 0``. ``exponential_decay``: ``f`` vanishes off
            ``O_a`` and ``g`` vanishes where ``a(., 0) > 0``. ``limit``: the
            active sets are nondecreasing and ``g`` lives on ``Omega_a(0)``.
        """
        if target not in HYPOTHESIS_TARGETS:
            raise UsageError(f"Unknown hypothesis target '{target}', expected one of {HYPOTHESIS_TARGETS}")
        g = self.initial_values()

        if target == "limit":
            masks = self.active_layers()
            if np.any(masks[:-1] & ~masks[1:]):
                raise ContractError(
                    "Active sets Omega_a(t) must be nondecreasing in t for the limit problem"
                )
            if np.any(~masks[0] & (g != 0)):
                raise ContractError(
                    "Initial datum must be supported in closure(Omega_a(0)) for the limit problem"
                )
            return

        a0 = self.potential_layers()[0]
        if np.any((a0 > 0) & (g != 0)):
            raise ContractError(
                "Initial datum must vanish where a(., 0) > 0 "
                f"(required for {target.replace('_', ' ')})"
            )
        if target == "strong_convergence":
            if not self.potential.monotone_flag:
                raise ContractError("Assumption (A) required for strong convergence")
            if not verify_potential(self.potential, self.grid, self.time_grid)["monotone"]:
                raise ContractError("Assumption (A) violated: a increases in time at a grid sample")
        else:
            masks = self.active_layers()
            if np.any(self.forcing_layers()[~masks] != 0):
                raise ContractError("Forcing must vanish on Q_T \\ O_a for exponential decay")


class ParabolicSolver:
    """
    Implicit solvers for one :class:`ProblemSpec`.

    The discrete Laplacian is assembled once per solver and shared by both
    schemes.
    """

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        self.logger = logging.getLogger(__name__)
        self.laplacian = assemble_dirichlet_laplacian(problem.grid)
        self.available_functions = {
            "solve_penalized": self.solve_penalized,
            "solve_limit": self.solve_limit,
        }

    def get_solver_list(self) -> List[str]:
        """Names of the available schemes."""
        return list(self.available_functions.keys())

    def get_solver_description(self) -> Dict[str, str]:
        """First paragraph of each scheme's docstring."""
        descriptions = {}
        for name, func in self.available_functions.items():
            doc = inspect.getdoc(func) or ""
            descriptions[name] = doc.split("\n\n")[0].replace("\n", " ").strip()
        return descriptions

    def _step(self, operator: SparseOperator, rhs: np.ndarray, guess: np.ndarray, k: int) -> np.ndarray:
        try:
            x, stats = cg_solve(
                operator, rhs, tol=self.problem.cg_tol, maxiter=self.problem.cg_maxiter, x0=guess
            )
        except SolverConvergenceError as err:
            raise err.at_step(k) from err
        self.logger.debug(f"step {k}: {stats.iterations} CG iterations, residual {stats.residual:.2e}")
        return x

    def solve_penalized(self) -> Trajectory:
        """
        Solve the penalized problem with backward Euler.

        The potential is taken at the new level ``t_k``, so every step
        operator is symmetric positive definite for any ``lambda >= 0``.

        Returns
        -------
        Trajectory
            Layers ``0..m``, layer 0 being ``g``.

        Raises
        ------
        SolverConvergenceError
            Tagged with the failing time step.
        """
        p = self.problem
        dt = p.time_grid.dt
        potential = p.potential_layers()
        forcing = p.forcing_layers()
        self.logger.info(
            f"Penalized solve: {p.grid.size} nodes, {p.time_grid.step_count} steps, lambda={p.penalty:g}"
        )

        u = p.initial_values()
        layers = [u]
        operator, previous_shift = None, None
        for k in range(1, p.time_grid.step_count + 1):
            shift = 1.0 / dt + p.penalty * potential[k]
            if operator is None or not np.array_equal(shift, previous_shift):
                operator = add_diagonal(self.laplacian, shift)
                previous_shift = shift
            u = self._step(operator, forcing[k] + u / dt, u, k)
            layers.append(u)
        return Trajectory(p.grid, p.time_grid, np.array(layers), scheme="penalized", penalty=p.penalty)

    def solve_limit(self) -> Trajectory:
        """
        Solve the limit problem by masking the heat step to ``Omega_a(t_k)``.

        Nodes that join the active set enter with the value 0 they held.

        Returns
        -------
        Trajectory
            Layers ``0..m``, zero outside the active set of each level.

        Raises
        ------
        ContractError
            If the active sets shrink in time or ``g`` lives outside ``Omega_a(0)``.
        """
        p = self.problem
        p.check_hypotheses("limit")
        dt = p.time_grid.dt
        masks = p.active_layers()
        forcing = p.forcing_layers()
        self.logger.info(
            f"Limit solve: {p.grid.size} nodes, {p.time_grid.step_count} steps, "
            f"{int(masks[0].sum())} -> {int(masks[-1].sum())} active"
        )

        u = p.initial_values()
        layers = [u]
        operator, previous_mask = None, None
        for k in range(1, p.time_grid.step_count + 1):
            mask = masks[k]
            if not mask.any():
                u = np.zeros(p.grid.size)
                layers.append(u)
                continue
            if operator is None or not np.array_equal(mask, previous_mask):
                restricted = self.laplacian.restrict(mask)
                operator = add_diagonal(restricted, np.full(restricted.dimension, 1.0 / dt))
                previous_mask = mask
            x = self._step(operator, forcing[k][mask] + u[mask] / dt, u[mask], k)
            u = np.zeros(p.grid.size)
            u[mask] = x
            layers.append(u)
        return Trajectory(p.grid, p.time_grid, np.array(layers), scheme="limit", penalty=0.0)


def solve_penalized(problem: ProblemSpec) -> Trajectory:
    """Backward Euler trajectory of the penalized problem."""
    return ParabolicSolver(problem).solve_penalized()


def solve_limit(problem: ProblemSpec) -> Trajectory:
    """Masked backward Euler trajectory of the limit problem."""
    return ParabolicSolver(problem).solve_limit()

"""
Stationary penalized and limit problems.

``-Lap u + lambda a u = f`` on the whole grid, and ``-Lap u = f`` on the
interior of ``K_a = {a = 0}`` with ``u = 0`` elsewhere, together with the
energy ``E_lambda(u) = int |grad u|^2 + lambda a u^2`` and the objective
``E_lambda(u) - 2 int f u`` the penalized solution minimizes.
"""

import inspect
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .exceptions import ConfigurationError, GeometryError, UsageError
from .grid import Field, Grid, assemble_dirichlet_laplacian, gradient_inner, l2_inner
from .linalg import DEFAULT_TOL, add_diagonal, cg_solve
from .potential import PotentialSpec, zero_set_interior, active_mask, sample_potential_at
from .sources import SourceSpec


@dataclass(frozen=True, eq=False)
class StationarySpec:
    """
    Data of a stationary problem on one grid.

    Attributes
    ----------
    grid : Grid
    potential : np.ndarray
        ``a(x_i) >= 0`` at every node.
    forcing : np.ndarray
        ``f(x_i)`` at every node.
    penalty : float
        ``lambda >= 0``.
    zero_set : np.ndarray, optional
        Node mask of the interior of ``K_a``. Defaults to the nodes where ``a``
        vanishes together with all grid neighbours.
    """

    grid: Grid
    potential: np.ndarray
    forcing: np.ndarray
    penalty: float = 0.0
    zero_set: Optional[np.ndarray] = None
    cg_tol: float = DEFAULT_TOL
    cg_maxiter: Optional[int] = None

    def __post_init__(self):
        n = self.grid.size
        a = np.array(self.potential, dtype=np.float64).ravel()
        f = np.array(self.forcing, dtype=np.float64).ravel()
        if a.shape != (n,) or f.shape != (n,):
            raise ConfigurationError(
                f"Potential and forcing need {n} node values, got {a.size} and {f.size}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(f))):
            raise ConfigurationError("Potential and forcing must be finite")
        if np.any(a < 0):
            raise ConfigurationError("Potential must be non-negative")
        if not np.isfinite(self.penalty) or self.penalty < 0:
            raise ConfigurationError(f"lambda must be finite and non-negative, got {self.penalty}")
        mask = zero_set_interior(a, self.grid) if self.zero_set is None else np.array(self.zero_set, dtype=bool)
        if mask.shape != (n,):
            raise ConfigurationError(f"Zero-set mask needs {n} entries, got {mask.size}")
        for name, value in (("potential", a), ("forcing", f), ("zero_set", mask)):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @classmethod
    def from_specs(
        cls,
        grid: Grid,
        potential: PotentialSpec,
        forcing: SourceSpec,
        penalty: float = 0.0,
        t: float = 0.0,
        horizon: float = np.inf,
        cg_tol: float = DEFAULT_TOL,
    ) -> "StationarySpec":
        """Freeze an analytic potential and source at time ``t``."""
        mask = active_mask(potential, grid, t)
        return cls(
            grid,
            sample_potential_at(potential, grid, t, horizon),
            forcing.sample(grid, mask),
            penalty,
            zero_set=mask,
            cg_tol=cg_tol,
        )

    def with_penalty(self, penalty: float) -> "StationarySpec":
        return replace(self, penalty=float(penalty))

    def require_zero_set(self) -> np.ndarray:
        if not self.zero_set.any():
            raise GeometryError("The interior of K_a is empty at grid resolution")
        return self.zero_set


def _values(spec: StationarySpec, u: Union[Field, np.ndarray]) -> np.ndarray:
    if isinstance(u, Field):
        if u.grid != spec.grid:
            raise UsageError("Field lives on a different grid than the problem")
        return u.values
    values = np.asarray(u, dtype=np.float64)
    if values.shape != (spec.grid.size,):
        raise UsageError(f"Expected {spec.grid.size} node values, got shape {values.shape}")
    return values


class StationarySolver:
    """Solvers and energies for one :class:`StationarySpec`."""

    def __init__(self, spec: StationarySpec):
        self.spec = spec
        self.logger = logging.getLogger(__name__)
        self.laplacian = assemble_dirichlet_laplacian(spec.grid)
        self.available_functions = {
            "solve_penalized": self.solve_penalized,
            "solve_limit": self.solve_limit,
            "energy": self.energy,
            "alpha": self.alpha,
        }

    def get_solver_list(self) -> List[str]:
        return list(self.available_functions.keys())

    def get_solver_description(self) -> Dict[str, str]:
        return {
            name: (inspect.getdoc(func) or "").split("\n\n")[0].replace("\n", " ")
            for name, func in self.available_functions.items()
        }

    def solve_penalized(self) -> Field:
        """Solve ``(A + lambda diag(a)) u = f`` to CG tolerance."""
        s = self.spec
        operator = add_diagonal(self.laplacian, s.penalty * s.potential)
        u, stats = cg_solve(operator, s.forcing, tol=s.cg_tol, maxiter=s.cg_maxiter)
        self.logger.info(
            f"Stationary penalized solve, lambda={s.penalty:g}: {stats.iterations} CG iterations"
        )
        return Field(s.grid, u)

    def solve_limit(self) -> Field:
        """
        Solve ``A u = f`` on the interior of ``K_a``, ``u = 0`` elsewhere.

        Raises
        ------
        GeometryError
            If the interior of ``K_a`` has no node.
        """
        s = self.spec
        mask = s.require_zero_set()
        operator = self.laplacian.restrict(mask)
        x, stats = cg_solve(operator, s.forcing[mask], tol=s.cg_tol, maxiter=s.cg_maxiter)
        self.logger.info(f"Stationary limit solve on {int(mask.sum())} nodes: {stats.iterations} CG iterations")
        u = np.zeros(s.grid.size)
        u[mask] = x
        return Field(s.grid, u)

    def energy(self, u: Union[Field, np.ndarray]) -> Tuple[float, float]:
        """
        Energy of ``u`` and the objective minimized by the penalized solution.

        Returns
        -------
        tuple of float
            ``(E_lambda(u), E_lambda(u) - 2 int f u)``.
        """
        s = self.spec
        values = _values(s, u)
        energy = gradient_inner(s.grid, values, values) + s.penalty * l2_inner(
            s.grid, s.potential * values, values
        )
        return energy, energy - 2.0 * l2_inner(s.grid, s.forcing, values)

    def alpha(self) -> float:
        """Minimum of the objective, reached at the penalized solution."""
        return self.energy(self.solve_penalized())[1]


def solve_stationary_penalized(spec: StationarySpec) -> Field:
    return StationarySolver(spec).solve_penalized()


def solve_stationary_limit(spec: StationarySpec) -> Field:
    return StationarySolver(spec).solve_limit()


def stationary_energy(spec: StationarySpec, u: Union[Field, np.ndarray]) -> Tuple[float, float]:
    """``(E_lambda(u), E_lambda(u) - 2 int f u)`` with the grid quadratures."""
    return StationarySolver(spec).energy(u)


def stationary_alpha(spec: StationarySpec) -> float:
    return StationarySolver(spec).alpha()

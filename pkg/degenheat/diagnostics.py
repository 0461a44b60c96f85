"""
Numerical checks of the energy bounds, convergence and decay statements.

Every check consumes solver output and returns a report dataclass with a
``to_frame`` method; the command line runner writes those frames as CSV.
Sweeps solve one problem per ``lambda`` on a thread pool and merge the
records sorted by ``lambda``.
"""

import inspect
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from textwrap import dedent
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import ContractError, GeometryError, UsageError
from .grid import Field, Trajectory, discrete_norm, gradient_inner, l2_inner
from .parabolic import ProblemSpec, ParabolicSolver
from .potential import DecayGeometry, build_decay_geometry
from .stationary import StationarySolver, StationarySpec
from .utils import Utility

DEFAULT_TOL_DISC = 0.05
DEFAULT_DECAY_SLACK = 1e3
INVERSION_SLACK = 0.01
ERROR_DROP_TARGET = 30.0
MASS_DROP_TARGET = 100.0

ENERGY_COLUMNS = ["name", "lhs", "rhs", "ratio", "satisfied"]
SWEEP_COLUMNS = ["lambda", "err_l2h1", "err_supl2", "pen_mass"]
DECAY_COLUMNS = ["lambda", "I_eps", "W", "scaled", "slope_fit", "residual"]


# ---------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class BoundRecord:
    name: str
    lhs: float
    rhs: float
    ratio: float
    satisfied: bool


def make_bound_record(name: str, lhs: float, rhs: float, tol_disc: float) -> BoundRecord:
    """``satisfied`` iff ``lhs <= rhs * (1 + tol_disc)``; the ratio is 0 when both sides are 0."""
    lhs, rhs = float(lhs), float(rhs)
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = 0.0 if lhs <= 0 else float("inf")
    return BoundRecord(name, lhs, rhs, ratio, bool(lhs <= rhs * (1 + tol_disc)))


@dataclass(frozen=True)
class EnergyReport:
    """LHS against RHS for each requested energy bound."""

    records: Tuple[BoundRecord, ...]
    tol_disc: float = DEFAULT_TOL_DISC

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.records)

    def record(self, name: str) -> BoundRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(f"No bound named '{name}' in this report")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[r.name, r.lhs, r.rhs, r.ratio, r.satisfied] for r in self.records],
            columns=ENERGY_COLUMNS,
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, tol_disc: float = DEFAULT_TOL_DISC) -> "EnergyReport":
        records = tuple(
            BoundRecord(str(row.name), float(row.lhs), float(row.rhs), float(row.ratio), bool(row.satisfied))
            for row in frame[ENERGY_COLUMNS].itertuples(index=False)
        )
        return cls(records, tol_disc)


@dataclass(frozen=True)
class SweepRecord:
    penalty: float
    err_l2h1: float
    err_supl2: float
    pen_mass: float


@dataclass(frozen=True)
class SweepReport:
    """
    Distance between penalized and limit trajectories across a ``lambda`` sweep.

    Attributes
    ----------
    records : tuple of SweepRecord
        Sorted by ``lambda`` ascending.
    bound_ratios : tuple of float
        bound2 LHS/RHS of each penalized run, aligned with ``records``.
    """

    records: Tuple[SweepRecord, ...]
    bound_ratios: Tuple[float, ...] = ()

    @property
    def penalties(self) -> np.ndarray:
        return np.array([r.penalty for r in self.records])

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.err_l2h1 for r in self.records])

    @property
    def inversions(self) -> List[int]:
        """Indices ``i`` where the error did not decrease from ``i - 1``."""
        errors = self.errors
        return [i for i in range(1, len(errors)) if errors[i] >= errors[i - 1]]

    @property
    def violations(self) -> List[int]:
        """Inversions larger than the quadrature slack."""
        errors = self.errors
        return [i for i in self.inversions if errors[i] > errors[i - 1] * (1 + INVERSION_SLACK)]

    def is_decreasing(self, allowed_inversions: int = 1) -> bool:
        return not self.violations and len(self.inversions) <= allowed_inversions

    @property
    def masses(self) -> np.ndarray:
        return np.array([r.pen_mass for r in self.records])

    @property
    def error_drop(self) -> float:
        """``err_l2h1`` at the smallest ``lambda`` over its value at the largest."""
        return _drop(self.errors)

    @property
    def mass_drop(self) -> float:
        """Penalization mass at the smallest ``lambda`` over its value at the largest."""
        return _drop(self.masses)

    def error_order(self) -> float:
        """Least-squares slope of ``log err_l2h1`` against ``log lambda``."""
        errors = self.errors
        valid = errors > 0
        if valid.sum() < 2:
            return float("nan")
        return float(np.polyfit(np.log(self.penalties[valid]), np.log(errors[valid]), 1)[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[r.penalty, r.err_l2h1, r.err_supl2, r.pen_mass] for r in self.records],
            columns=SWEEP_COLUMNS,
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "SweepReport":
        """Rebuild the records; ``bound_ratios`` are not part of the CSV and come back empty."""
        return cls(
            tuple(
                SweepRecord(*(float(v) for v in row))
                for row in frame[SWEEP_COLUMNS].itertuples(index=False)
            )
        )


@dataclass(frozen=True)
class DecayRecord:
    penalty: float
    i_eps: float
    weighted: float
    scaled: float


@dataclass(frozen=True)
class DecayReport:
    """
    Decay of the penalized solution away from the vanishing set.

    Per ``lambda``: ``I_eps = int_{A_eps} u^2``, the weighted integral ``W``
    and ``lambda * exp(c_eps sqrt(lambda)) * I_eps``. The slope is the fit of
    ``log I`` over ``A_3eps`` against ``sqrt(lambda)``; ``residual`` is the
    RMS of that fit.

    The remaining fields are kept in memory only: the integrals over
    ``A_3eps`` and ``A_2eps``, the weighted-estimate scaled quantity
    ``lambda * exp(2 eps kappa sqrt(lambda)) * I_{A_3eps}`` and the
    ``lambda * exp(4 eps sqrt(lambda) delta/2) * I_{A_2eps}`` form.
    """

    records: Tuple[DecayRecord, ...]
    slope_fit: float
    residual: float
    epsilon: float = float("nan")
    delta: float = float("nan")
    c_eps: float = float("nan")
    weight_scale: float = float("nan")
    fit_integrals: Tuple[float, ...] = ()
    core_integrals: Tuple[float, ...] = ()
    fit_scaled: Tuple[float, ...] = ()
    core_scaled: Tuple[float, ...] = ()
    slack: float = DEFAULT_DECAY_SLACK

    @property
    def penalties(self) -> np.ndarray:
        return np.array([r.penalty for r in self.records])

    @property
    def predicted_slope(self) -> float:
        """Rate implied by the weighted estimate on ``A_3eps``: ``-2 eps kappa``."""
        return -2.0 * self.epsilon * self.weight_scale

    @staticmethod
    def _ratio_to_first(values: Sequence[float]) -> float:
        values = np.asarray(values, dtype=float)
        if values.size == 0 or values[0] <= 0:
            return float("inf")
        return float(np.max(values) / values[0])

    @property
    def weighted_ratio(self) -> float:
        return self._ratio_to_first([r.weighted for r in self.records])

    @property
    def scaled_ratio(self) -> float:
        return self._ratio_to_first([r.scaled for r in self.records])

    @property
    def fit_ratio(self) -> float:
        return self._ratio_to_first(self.fit_scaled)

    @property
    def bounded(self) -> bool:
        """Boundedness verdict on the weighted-estimate scaled quantity."""
        return self.fit_ratio <= self.slack

    @property
    def i_eps_drop(self) -> float:
        first, last = self.records[0].i_eps, self.records[-1].i_eps
        return float("inf") if last <= 0 else first / last

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                [r.penalty, r.i_eps, r.weighted, r.scaled, self.slope_fit, self.residual]
                for r in self.records
            ],
            columns=DECAY_COLUMNS,
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "DecayReport":
        """
        Rebuild the CSV part of a report: records, slope and residual.

        The in-memory fields are not written to CSV and come back as NaN or
        empty, so ``bounded`` and ``predicted_slope`` need the original report.
        """
        records = tuple(
            DecayRecord(float(row[0]), float(row[1]), float(row[2]), float(row[3]))
            for row in frame[DECAY_COLUMNS].itertuples(index=False)
        )
        return cls(records, float(frame["slope_fit"].iloc[0]), float(frame["residual"].iloc[0]))


@dataclass(frozen=True)
class StationarySweepRecord:
    penalty: float
    err_h1semi: float
    pen_mass: float
    alpha: float
    energy_defect: float


@dataclass(frozen=True)
class StationarySweepReport:
    """
    Stationary penalized solutions against the limit solution.

    ``floor`` is the H1 seminorm distance between the limit solution and the
    limit solution of the refined grid restricted to the coarse nodes, or NaN
    when no refined problem was supplied.
    """

    records: Tuple[StationarySweepRecord, ...]
    floor: float = float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[r.penalty, r.err_h1semi, r.pen_mass, r.alpha, r.energy_defect] for r in self.records],
            columns=["lambda", "err_h1semi", "pen_mass", "alpha", "energy_defect"],
        )


@dataclass(frozen=True)
class StationaryDecayRecord:
    penalty: float
    i_eps: float
    weighted: float
    rate_integral: float


@dataclass(frozen=True)
class StationaryDecayReport:
    """
    Per ``lambda``: ``int_{Omega_eps} u^2``, the weighted integral with factor
    ``lambda delta / 2`` and ``int_{Omega_2eps} lambda exp(2 sqrt(lambda) rho) u^2``.
    """

    records: Tuple[StationaryDecayRecord, ...]
    epsilon: float
    delta: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[r.penalty, r.i_eps, r.weighted, r.rate_integral] for r in self.records],
            columns=["lambda", "I_eps", "W", "rate_integral"],
        )


class Pairing(NamedTuple):
    """``<lambda a u, phi>`` and the same pairing rebuilt from the scheme."""

    value: float
    identity: float

    @property
    def discrepancy(self) -> float:
        return abs(self.value - self.identity)


# ---------------------------------------------------------------------
# Quadratures shared by the checks
# ---------------------------------------------------------------------


@dataclass
class _EnergyTerms:
    l2_sq: np.ndarray
    grad_sq: np.ndarray
    pen: np.ndarray
    forcing_sq: float
    initial_penalty: float


def _require_match(trajectory: Trajectory, problem: ProblemSpec) -> None:
    if trajectory.grid != problem.grid or trajectory.time_grid != problem.time_grid:
        raise UsageError("Trajectory and problem live on different grids")


def _energy_terms(trajectory: Trajectory, problem: ProblemSpec) -> _EnergyTerms:
    grid, dt = trajectory.grid, trajectory.time_grid.dt
    layers = trajectory.layers
    potential = problem.potential_layers()
    forcing = problem.forcing_layers()
    g = layers[0]
    return _EnergyTerms(
        l2_sq=np.array([l2_inner(grid, u, u) for u in layers]),
        grad_sq=np.array([gradient_inner(grid, u, u) for u in layers]),
        pen=np.array([l2_inner(grid, a * u, u) for a, u in zip(potential, layers)]),
        forcing_sq=dt * sum(l2_inner(grid, f, f) for f in forcing[1:]),
        initial_penalty=l2_inner(grid, potential[0] * g, g),
    )


def _ratio(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    positive = values[values > 0]
    return float(positive.max() / positive.min()) if positive.size else float("nan")


def _drop(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan")
    return float("inf") if values[-1] <= 0 else float(values[0] / values[-1])


# ---------------------------------------------------------------------
# Manager
# ---------------------------------------------------------------------


class DiagnosticsManager:
    """
    Runs the estimate checks and parameter sweeps.

    Parameters
    ----------
    tol_disc : float
        Relative slack allowed on discrete energy inequalities.
    max_workers : int, optional
        Thread cap for sweeps; defaults to ``DEGENHEAT_THREADS`` or the CPU count.
    """

    def __init__(self, tol_disc: float = DEFAULT_TOL_DISC, max_workers: Optional[int] = None):
        self.tol_disc = tol_disc
        self.max_workers = max_workers
        self.logger = logging.getLogger(__name__)
        self.available_checks: Dict[str, Callable] = {
            "check_energy_bounds": self.check_energy_bounds,
            "weighted_decay_integral": self.weighted_decay_integral,
            "distributional_pairing": self.distributional_pairing,
            "convergence_sweep": self.convergence_sweep,
            "decay_sweep": self.decay_sweep,
            "stationary_convergence_sweep": self.stationary_convergence_sweep,
            "stationary_decay_sweep": self.stationary_decay_sweep,
        }

    def get_check_list(self) -> List[str]:
        """
        Retrieve the list of available checks.
        """
        return list(self.available_checks.keys())

    def get_check_description(self) -> Dict[str, Dict[str, Optional[str]]]:
        """
        Describe every check by parsing its docstring into a summary and its
        ``Returns`` and ``Raises`` sections.
        """
        descriptions = {}
        for name, func in self.available_checks.items():
            entry = {"description": None, "returns": None, "raises": None}
            descriptions[name] = entry
            doc = inspect.getdoc(func)
            if not doc:
                continue
            section, summary, body = None, [], {}
            for line in dedent(doc).splitlines():
                stripped = line.strip()
                if stripped.lower() in ("parameters", "returns", "raises"):
                    section = stripped.lower()
                    continue
                if not stripped or set(stripped) == {"-"}:
                    continue
                if section is None:
                    summary.append(stripped)
                elif section in ("returns", "raises"):
                    body.setdefault(section, []).append(stripped)
            entry["description"] = " ".join(summary) or None
            for key, lines in body.items():
                entry[key] = " ".join(lines)
        return descriptions

    def get_check_parameters(self, check_name: str) -> str:
        """
        Parameter names and defaults of a check, formatted as markdown.
        """
        func = self.available_checks.get(check_name)
        if func is None:
            return "Check not found."
        output = f"### {check_name}\n\n**Parameters:**\n"
        for name, param in inspect.signature(func).parameters.items():
            default = "" if param.default is inspect.Parameter.empty else f" = `{param.default!r}`"
            output += f" - `{name}`{default}\n"
        return output

    def _map(self, func: Callable, items: Sequence) -> List:
        workers = Utility.resolve_thread_count(len(items), self.max_workers)
        if workers == 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))

    @staticmethod
    def _check_penalties(penalties: Sequence[float], minimum: int = 3) -> List[float]:
        values = [float(v) for v in penalties]
        if len(values) < minimum:
            raise UsageError(f"A sweep needs at least {minimum} lambda values, got {len(values)}")
        if any(not np.isfinite(v) or v <= 0 for v in values):
            raise UsageError("Sweep lambda values must be positive and finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise UsageError("Sweep lambda values must be strictly ascending")
        return values

    # -- energy bounds -------------------------------------------------

    def check_energy_bounds(
        self,
        trajectory: Trajectory,
        problem: ProblemSpec,
        bounds: Optional[Sequence[str]] = None,
    ) -> EnergyReport:
        """
        Evaluate the discrete energy bounds on a solved trajectory.

        Penalized trajectories default to ``bound2``, ``penalization_mass`` and,
        under Assumption (A), ``derbound``; limit trajectories to ``energyInf``.
        ``derbound`` and ``energyInf`` bound, for every level ``s``, the
        running sum up to ``s`` together with the value at ``s``.

        Parameters
        ----------
        trajectory : Trajectory
            Output of ``solve_penalized`` or ``solve_limit`` for ``problem``.
        problem : ProblemSpec
            The problem that produced ``trajectory``.
        bounds : sequence of str, optional
            Subset of ``bound2``, ``derbound``, ``energyInf``, ``penalization_mass``.

        Returns
        -------
        EnergyReport
            One record per bound, in the order requested.

        Raises
        ------
        ContractError
            ``derbound`` requested for a potential without Assumption (A).
        """
        _require_match(trajectory, problem)
        monotone = problem.potential.monotone_flag
        if bounds is None:
            if trajectory.scheme == "limit":
                bounds = ("energyInf",)
            else:
                bounds = ("bound2", "penalization_mass") + (("derbound",) if monotone else ())
        unknown = set(bounds) - {"bound2", "derbound", "energyInf", "penalization_mass"}
        if unknown:
            raise UsageError(f"Unknown bounds {sorted(unknown)}")
        if "derbound" in bounds and not monotone:
            raise ContractError("Assumption (A) required for derbound")

        terms = _energy_terms(trajectory, problem)
        dt, horizon = trajectory.time_grid.dt, trajectory.time_grid.horizon
        lam = trajectory.penalty
        grad_integral = dt * np.sum(terms.grad_sq[1:])
        penalty_mass = lam * dt * np.sum(terms.pen[1:])
        bound2_rhs = terms.l2_sq[0] + horizon * terms.forcing_sq

        records = []
        for name in bounds:
            if name == "bound2":
                lhs = 0.25 * np.max(terms.l2_sq) + grad_integral + penalty_mass
                records.append(make_bound_record(name, lhs, bound2_rhs, self.tol_disc))
            elif name == "penalization_mass":
                records.append(make_bound_record(name, penalty_mass, bound2_rhs, self.tol_disc))
            elif name == "derbound":
                increments = np.diff(trajectory.layers, axis=0) / dt
                running = np.concatenate(
                    ([0.0], np.cumsum([dt * l2_inner(trajectory.grid, d, d) for d in increments]))
                )
                lhs = np.max(running + terms.grad_sq)
                rhs = terms.forcing_sq + terms.grad_sq[0] + lam * terms.initial_penalty
                records.append(make_bound_record(name, lhs, rhs, self.tol_disc))
            else:
                running = np.concatenate(([0.0], np.cumsum(dt * terms.grad_sq[1:])))
                lhs = np.max(0.5 * terms.l2_sq + running) - 0.25 * np.max(terms.l2_sq)
                rhs = 0.5 * terms.l2_sq[0] + horizon * terms.forcing_sq
                records.append(make_bound_record(name, lhs, rhs, self.tol_disc))

        report = EnergyReport(tuple(records), self.tol_disc)
        for r in report.records:
            if not r.satisfied:
                self.logger.warning(f"{r.name} violated: lhs={r.lhs:.6g} rhs={r.rhs:.6g}")
        return report

    # -- weighted integrals and pairings -------------------------------

    def weighted_decay_integral(
        self,
        subject: Union[Trajectory, Field],
        geometry: DecayGeometry,
        problem: Union[ProblemSpec, StationarySpec],
    ) -> float:
        """
        Weighted integral ``int e^{2 sqrt(lambda) rho} eta^2 u (c lambda delta u - f)``.

        The parabolic form integrates layers ``1..m`` with ``c = 1/4``; the
        stationary form integrates in space with ``c = 1/2``.

        Returns
        -------
        float
            The weighted integral.

        Raises
        ------
        UsageError
            If the geometry, the subject and the problem do not share a grid.
        """
        if isinstance(subject, Trajectory):
            if geometry.stationary or not isinstance(problem, ProblemSpec):
                raise UsageError("A trajectory needs a space-time geometry and a ProblemSpec")
            _require_match(subject, problem)
            if geometry.grid != subject.grid or geometry.time_grid != subject.time_grid:
                raise UsageError("Decay geometry was built on a different grid")
            lam, factor = subject.penalty, 0.25
            u = subject.layers[1:]
            f = problem.forcing_layers()[1:]
            weight, eta = geometry.weight[1:], geometry.cutoff[1:]
            dt = subject.time_grid.dt
        elif isinstance(subject, Field):
            if not geometry.stationary or not isinstance(problem, StationarySpec):
                raise UsageError("A field needs a stationary geometry and a StationarySpec")
            if geometry.grid != subject.grid or problem.grid != subject.grid:
                raise UsageError("Decay geometry was built on a different grid")
            lam, factor = problem.penalty, 0.5
            u = subject.values[None, :]
            f = problem.forcing[None, :]
            weight, eta = geometry.weight, geometry.cutoff
            dt = 1.0
        else:
            raise UsageError(f"Cannot integrate {type(subject).__name__}")

        with np.errstate(over="ignore"):
            integrand = np.exp(2 * np.sqrt(lam) * weight) * eta**2 * u * (factor * lam * geometry.delta * u - f)
        integrand = np.where(eta > 0, integrand, 0.0)
        return float(dt * geometry.grid.cell_volume * np.sum(integrand))

    def distributional_pairing(
        self,
        u: Union[Field, Trajectory],
        problem: Union[StationarySpec, ProblemSpec],
        phi: np.ndarray,
    ) -> Pairing:
        """
        Pair ``lambda a u`` with a test function, directly and through the scheme.

        The identity value is ``<f, phi> - <grad u, grad phi>`` in the stationary
        case and additionally subtracts ``<(u^k - u^{k-1})/dt, phi>`` in the
        parabolic case; both agree up to the solver residual.

        Parameters
        ----------
        u : Field or Trajectory
            Solved penalized field or trajectory.
        problem : StationarySpec or ProblemSpec
            The problem that produced ``u``.
        phi : np.ndarray
            Node values (stationary) or ``(m + 1, n)`` layers (parabolic). Any
            interior values are allowed; in the parabolic case the first and
            last layers must vanish.

        Returns
        -------
        Pairing
            ``(value, identity)``.

        Raises
        ------
        UsageError
            If ``phi`` has the wrong shape or does not vanish at t = 0 and t = T.
        """
        grid = u.grid
        phi = np.asarray(phi, dtype=np.float64)

        if isinstance(u, Field):
            if not isinstance(problem, StationarySpec) or problem.grid != grid:
                raise UsageError("A field pairs with the StationarySpec it was solved from")
            if phi.shape != (grid.size,):
                raise UsageError(f"Test function needs {grid.size} node values")
            lam = problem.penalty
            value = lam * l2_inner(grid, problem.potential * u.values, phi)
            identity = l2_inner(grid, problem.forcing, phi) - gradient_inner(grid, u.values, phi)
            return Pairing(value, identity)

        if not isinstance(problem, ProblemSpec):
            raise UsageError("A trajectory pairs with the ProblemSpec it was solved from")
        _require_match(u, problem)
        if phi.shape != u.layers.shape:
            raise UsageError(f"Test function needs shape {u.layers.shape}, got {phi.shape}")
        if np.any(phi[0] != 0) or np.any(phi[-1] != 0):
            raise UsageError("Test function must vanish at t = 0 and t = T")
        dt, lam = u.time_grid.dt, u.penalty
        potential = problem.potential_layers()
        forcing = problem.forcing_layers()
        value, identity = 0.0, 0.0
        for k in range(1, u.time_grid.step_count + 1):
            uk, phik = u.layers[k], phi[k]
            value += dt * lam * l2_inner(grid, potential[k] * uk, phik)
            identity += dt * (
                l2_inner(grid, forcing[k], phik)
                - gradient_inner(grid, uk, phik)
                - l2_inner(grid, (uk - u.layers[k - 1]) / dt, phik)
            )
        return Pairing(value, identity)

    # -- sweeps --------------------------------------------------------

    def convergence_sweep(self, problem: ProblemSpec, penalties: Sequence[float]) -> SweepReport:
        """
        Distance of penalized trajectories to the limit trajectory per ``lambda``.

        Parameters
        ----------
        problem : ProblemSpec
            Problem satisfying Assumption (A) with ``g`` vanishing where ``a(., 0) > 0``.
        penalties : sequence of float
            At least 3 strictly ascending values.

        Returns
        -------
        SweepReport
            ``err_l2h1``, ``err_supl2`` and the penalization mass per ``lambda``.

        Raises
        ------
        ContractError
            Naming the violated hypothesis.
        """
        penalties = self._check_penalties(penalties)
        problem.check_hypotheses("strong_convergence")
        limit = ParabolicSolver(problem).solve_limit()

        def run(lam: float):
            spec = problem.with_penalty(lam)
            trajectory = ParabolicSolver(spec).solve_penalized()
            difference = Trajectory(trajectory.grid, trajectory.time_grid, trajectory.layers - limit.layers)
            energy = self.check_energy_bounds(trajectory, spec, bounds=("bound2", "penalization_mass"))
            self.logger.info(f"convergence sweep: lambda={lam:g} done")
            return (
                SweepRecord(
                    lam,
                    discrete_norm(difference, "L2H1semi"),
                    discrete_norm(difference, "supL2"),
                    energy.record("penalization_mass").lhs,
                ),
                energy.record("bound2").ratio,
            )

        results = sorted(self._map(run, penalties), key=lambda item: item[0].penalty)
        report = SweepReport(tuple(r for r, _ in results), tuple(b for _, b in results))
        if report.violations:
            self.logger.warning(
                f"err_l2h1 increased at lambda={[report.records[i].penalty for i in report.violations]}"
            )
        return report

    def decay_sweep(
        self,
        problem: ProblemSpec,
        penalties: Sequence[float],
        epsilon: float,
        slack: float = DEFAULT_DECAY_SLACK,
    ) -> DecayReport:
        """
        Decay of penalized solutions on ``A_eps`` as ``lambda`` grows.

        Parameters
        ----------
        problem : ProblemSpec
            ``f`` vanishes off ``O_a`` and ``g`` vanishes where ``a(., 0) > 0``.
        penalties : sequence of float
            At least 3 strictly ascending values, all ``>= 4``.
        epsilon : float
            Distance to the vanishing set.
        slack : float
            Allowed growth of the scaled quantity over its first value.

        Returns
        -------
        DecayReport
            Integrals per ``lambda``, the fitted slope and its residual.

        Raises
        ------
        UsageError
            Fewer than 3 values: no fit is possible.
        GeometryError
            If ``A_3eps`` is empty at grid resolution.
        """
        penalties = self._check_penalties(penalties)
        if penalties[0] < 4:
            raise ContractError("The weighted decay estimate requires lambda >= 4")
        problem.check_hypotheses("exponential_decay")
        geometry = build_decay_geometry(problem.potential, problem.grid, problem.time_grid, epsilon)
        if not geometry.fit_mask.any():
            raise GeometryError(
                f"A_3eps is empty at grid resolution for epsilon={epsilon}; "
                "use a smaller epsilon or a finer grid"
            )
        dt, volume = problem.time_grid.dt, problem.grid.cell_volume

        def masked_integral(layers: np.ndarray, mask: np.ndarray) -> float:
            return float(dt * volume * np.sum(np.where(mask[1:], layers[1:] ** 2, 0.0)))

        def run(lam: float):
            spec = problem.with_penalty(lam)
            trajectory = ParabolicSolver(spec).solve_penalized()
            self.logger.info(f"decay sweep: lambda={lam:g} done")
            return (
                lam,
                masked_integral(trajectory.layers, geometry.inner_mask),
                masked_integral(trajectory.layers, geometry.fit_mask),
                masked_integral(trajectory.layers, geometry.core_mask),
                self.weighted_decay_integral(trajectory, geometry, spec),
            )

        rows = sorted(self._map(run, penalties))
        lam = np.array([r[0] for r in rows])
        i_eps = np.array([r[1] for r in rows])
        i_fit = np.array([r[2] for r in rows])
        i_core = np.array([r[3] for r in rows])
        root = np.sqrt(lam)
        with np.errstate(over="ignore"):
            scaled = lam * np.exp(geometry.c_eps * root) * i_eps
            fit_scaled = lam * np.exp(2 * epsilon * geometry.weight_scale * root) * i_fit
            core_scaled = lam * np.exp(4 * epsilon * root * geometry.delta / 2) * i_core

        valid = i_fit > 0
        if valid.sum() < 3:
            raise UsageError("The decay fit needs at least 3 positive integrals over A_3eps")
        coefficients = np.polyfit(root[valid], np.log(i_fit[valid]), 1)
        fitted = np.polyval(coefficients, root[valid])
        residual = float(np.sqrt(np.mean((np.log(i_fit[valid]) - fitted) ** 2)))

        report = DecayReport(
            records=tuple(
                DecayRecord(float(l), float(i), float(r[4]), float(s))
                for l, i, r, s in zip(lam, i_eps, rows, scaled)
            ),
            slope_fit=float(coefficients[0]),
            residual=residual,
            epsilon=epsilon,
            delta=geometry.delta,
            c_eps=geometry.c_eps,
            weight_scale=geometry.weight_scale,
            fit_integrals=tuple(float(v) for v in i_fit),
            core_integrals=tuple(float(v) for v in i_core),
            fit_scaled=tuple(float(v) for v in fit_scaled),
            core_scaled=tuple(float(v) for v in core_scaled),
            slack=slack,
        )
        self.logger.info(
            f"decay fit slope {report.slope_fit:.4g} (weighted estimate rate {report.predicted_slope:.4g}), "
            f"W max/min {_ratio([r.weighted for r in report.records]):.3g}"
        )
        if not report.bounded:
            self.logger.warning(f"scaled quantity grew by {report.fit_ratio:.3g} over the sweep")
        return report

    def stationary_convergence_sweep(
        self,
        spec: StationarySpec,
        penalties: Sequence[float],
        refined: Optional[StationarySpec] = None,
    ) -> StationarySweepReport:
        """
        Stationary penalized solutions against the limit solution per ``lambda``.

        Parameters
        ----------
        spec : StationarySpec
            Problem with a nonempty zero-set interior.
        penalties : sequence of float
            At least 3 strictly ascending values.
        refined : StationarySpec, optional
            The same problem on ``spec.grid.refined()``, used for the floor.

        Returns
        -------
        StationarySweepReport
            H1 seminorm error, penalization mass, ``alpha`` and the relative
            energy-equality defect per ``lambda``.
        """
        penalties = self._check_penalties(penalties)
        limit = StationarySolver(spec).solve_limit()

        def run(lam: float) -> StationarySweepRecord:
            solver = StationarySolver(spec.with_penalty(lam))
            u = solver.solve_penalized()
            energy, objective = solver.energy(u)
            work = l2_inner(spec.grid, spec.forcing, u.values)
            defect = abs(energy - work) / max(abs(work), np.finfo(float).tiny)
            return StationarySweepRecord(
                lam,
                discrete_norm(Field(spec.grid, u.values - limit.values), "H1semi"),
                lam * l2_inner(spec.grid, spec.potential * u.values, u.values),
                objective,
                defect,
            )

        records = sorted(self._map(run, penalties), key=lambda r: r.penalty)
        floor = float("nan")
        if refined is not None:
            if refined.grid != spec.grid.refined():
                raise UsageError("The refined problem must live on spec.grid.refined()")
            fine = StationarySolver(refined).solve_limit().values[spec.grid.coarse_indices()]
            floor = discrete_norm(Field(spec.grid, limit.values - fine), "H1semi")
        return StationarySweepReport(tuple(records), floor)

    def stationary_decay_sweep(
        self,
        spec: StationarySpec,
        geometry: DecayGeometry,
        penalties: Sequence[float],
    ) -> StationaryDecayReport:
        """
        Stationary decay integrals per ``lambda`` on a stationary geometry.

        Returns
        -------
        StationaryDecayReport
            ``int_{Omega_eps} u^2``, the weighted integral and the rate integral.
        """
        penalties = self._check_penalties(penalties)
        if not geometry.stationary or geometry.grid != spec.grid:
            raise UsageError("Need a stationary geometry on the problem grid")
        volume = spec.grid.cell_volume
        inner, core = geometry.inner_mask[0], geometry.core_mask[0]

        def run(lam: float) -> StationaryDecayRecord:
            problem = spec.with_penalty(lam)
            u = StationarySolver(problem).solve_penalized()
            values = u.values
            with np.errstate(over="ignore"):
                rate = lam * np.exp(2 * np.sqrt(lam) * geometry.weight[0]) * values**2
            return StationaryDecayRecord(
                lam,
                float(volume * np.sum(values[inner] ** 2)),
                self.weighted_decay_integral(u, geometry, problem),
                float(volume * np.sum(rate[core])),
            )

        records = sorted(self._map(run, penalties), key=lambda r: r.penalty)
        return StationaryDecayReport(tuple(records), geometry.epsilon, geometry.delta)


# ---------------------------------------------------------------------
# Functional entry points
# ---------------------------------------------------------------------


def check_energy_bounds(
    trajectory: Trajectory,
    problem: ProblemSpec,
    bounds: Optional[Sequence[str]] = None,
    tol_disc: float = DEFAULT_TOL_DISC,
) -> EnergyReport:
    return DiagnosticsManager(tol_disc).check_energy_bounds(trajectory, problem, bounds)


def weighted_decay_integral(subject, geometry: DecayGeometry, problem) -> float:
    return DiagnosticsManager().weighted_decay_integral(subject, geometry, problem)


def distributional_pairing(u, problem, phi: np.ndarray) -> Pairing:
    return DiagnosticsManager().distributional_pairing(u, problem, phi)


def convergence_sweep(problem: ProblemSpec, penalties: Sequence[float], max_workers: Optional[int] = None) -> SweepReport:
    return DiagnosticsManager(max_workers=max_workers).convergence_sweep(problem, penalties)


def decay_sweep(
    problem: ProblemSpec,
    penalties: Sequence[float],
    epsilon: float,
    slack: float = DEFAULT_DECAY_SLACK,
    max_workers: Optional[int] = None,
) -> DecayReport:
    return DiagnosticsManager(max_workers=max_workers).decay_sweep(problem, penalties, epsilon, slack)

"""
Tests for the penalized and limit time-stepping schemes.

Run with:
    pytest tests/test_parabolic.py -v
"""

import numpy as np
import pytest

from degenheat.exceptions import ConfigurationError, ContractError, SolverConvergenceError
from degenheat.grid import (
    Field,
    assemble_dirichlet_laplacian,
    build_grid,
    build_time_grid,
    discrete_norm,
    layer_norms,
)
from degenheat.parabolic import ParabolicSolver, ProblemSpec, solve_limit, solve_penalized
from degenheat.potential import PotentialSpec, sample_potential
from degenheat.sources import SourceSpec


def _dense_reference(problem):
    """Backward Euler with dense direct solves, the same scheme as the solver."""
    grid, time_grid = problem.grid, problem.time_grid
    dt = time_grid.dt
    laplacian = assemble_dirichlet_laplacian(grid).to_dense()
    potential = sample_potential(problem.potential, grid, time_grid)
    forcing = problem.forcing_layers()
    u = problem.initial_values()
    layers = [u]
    for k in range(1, time_grid.step_count + 1):
        matrix = np.eye(grid.size) / dt + laplacian + problem.penalty * np.diag(potential[k])
        u = np.linalg.solve(matrix, forcing[k] + u / dt)
        layers.append(u)
    return np.array(layers)


def _make_heat_problem(n, m, horizon=0.1):
    return ProblemSpec(
        grid=build_grid([1.0], [n]),
        time_grid=build_time_grid(horizon, m),
        potential=PotentialSpec("zero"),
        initial=SourceSpec("mode", modes=(1,)),
    )


def _heat_error(n, m):
    problem = _make_heat_problem(n, m)
    final = solve_penalized(problem).final
    x = problem.grid.coordinates()[:, 0]
    exact = np.exp(-np.pi**2 * problem.time_grid.horizon) * np.sin(np.pi * x)
    return discrete_norm(Field(problem.grid, final.values - exact), "L2")


# ---------------------------------------------------------------------------
# ProblemSpec
# ---------------------------------------------------------------------------


class TestProblemSpec:
    def test_negative_penalty_rejected(self, slab_problem):
        with pytest.raises(ConfigurationError):
            slab_problem.with_penalty(-1.0)

    def test_forcing_restricted_to_active_sets(self, slab_problem):
        forcing = slab_problem.forcing_layers()
        masks = slab_problem.active_layers()
        assert forcing.shape == masks.shape
        assert np.all(forcing[~masks] == 0.0)
        assert forcing[0].max() > 0

    def test_hypotheses_hold_for_slab(self, slab_problem):
        for target in ("strong_convergence", "exponential_decay", "limit"):
            slab_problem.check_hypotheses(target)

    def test_initial_datum_outside_vanishing_set(self, slab_problem):
        problem = ProblemSpec(
            slab_problem.grid,
            slab_problem.time_grid,
            slab_problem.potential,
            initial=SourceSpec("mode", modes=(1,)),
        )
        with pytest.raises(ContractError, match="Initial datum must vanish"):
            problem.check_hypotheses("strong_convergence")

    def test_forcing_off_vanishing_set_blocks_decay(self, slab_problem):
        problem = ProblemSpec(
            slab_problem.grid,
            slab_problem.time_grid,
            slab_problem.potential,
            forcing=SourceSpec("constant"),
        )
        with pytest.raises(ContractError, match="Forcing must vanish"):
            problem.check_hypotheses("exponential_decay")

    def test_lattice_potential_without_assumption_a(self, slab_problem):
        grid, time_grid = slab_problem.grid, slab_problem.time_grid
        samples = sample_potential(slab_problem.potential, grid, time_grid)
        potential = PotentialSpec.from_samples(samples, grid, time_grid, monotone=False)
        problem = ProblemSpec(grid, time_grid, potential)
        with pytest.raises(ContractError, match="Assumption \\(A\\) required for strong convergence"):
            problem.check_hypotheses("strong_convergence")


# ---------------------------------------------------------------------------
# Penalized scheme
# ---------------------------------------------------------------------------


class TestPenalizedScheme:
    def test_matches_dense_reference(self, slab_potential):
        problem = ProblemSpec(
            grid=build_grid([1.0], [15]),
            time_grid=build_time_grid(0.1, 10),
            potential=slab_potential,
            forcing=SourceSpec("bump", center=(0.5,), width=0.15),
            initial=SourceSpec("bump", center=(0.5,), width=0.15),
            penalty=1e3,
            cg_tol=1e-13,
        )
        trajectory = solve_penalized(problem)
        assert np.max(np.abs(trajectory.layers - _dense_reference(problem))) < 1e-10

    def test_initial_layer_is_initial_datum(self, slab_problem):
        trajectory = solve_penalized(slab_problem)
        np.testing.assert_array_equal(trajectory.layers[0], slab_problem.initial_values())
        assert trajectory.scheme == "penalized"
        assert trajectory.penalty == slab_problem.penalty

    def test_manufactured_heat_solution(self):
        coarse = _heat_error(199, 400)
        assert coarse < 5e-3
        assert coarse / _heat_error(399, 800) >= 2.0

    def test_penalty_pushes_solution_to_zero(self, slab_problem):
        outside = slab_problem.potential_layers()[-1] > 0.1
        weak = solve_penalized(slab_problem.with_penalty(10.0)).final.values
        strong = solve_penalized(slab_problem.with_penalty(1e4)).final.values
        assert np.max(np.abs(strong[outside])) < np.max(np.abs(weak[outside]))

    def test_failure_reports_time_step(self, slab_problem):
        problem = ProblemSpec(
            slab_problem.grid,
            slab_problem.time_grid,
            slab_problem.potential,
            initial=slab_problem.initial,
            penalty=10.0,
            cg_maxiter=1,
        )
        with pytest.raises(SolverConvergenceError) as info:
            solve_penalized(problem)
        assert info.value.step == 1
        assert info.value.exit_code == 3

    @pytest.mark.parametrize("alpha", [-1.0, 2.0, 10.0])
    def test_linear_in_the_data(self, slab_problem, alpha):
        problem = ProblemSpec(
            slab_problem.grid,
            slab_problem.time_grid,
            slab_problem.potential,
            forcing=slab_problem.forcing,
            initial=slab_problem.initial,
            penalty=slab_problem.penalty,
            cg_tol=1e-12,
        )
        base = solve_penalized(problem).layers
        scaled = solve_penalized(problem.scaled_data(alpha)).layers
        assert np.max(np.abs(scaled - alpha * base)) <= 1e-9 * abs(alpha) * np.max(np.abs(base))

    @pytest.mark.parametrize("penalty", [0.0, 1e2, 1e4])
    def test_discrete_maximum_principle(self, slab_problem, penalty):
        problem = ProblemSpec(
            slab_problem.grid,
            slab_problem.time_grid,
            slab_problem.potential,
            forcing=SourceSpec("bump", center=(0.4,), width=0.3),
            initial=slab_problem.initial,
            penalty=penalty,
            cg_tol=1e-12,
        )
        assert np.min(solve_penalized(problem).layers) >= -1e-12

    def test_zero_penalty_ignores_the_potential(self, slab_potential):
        def make(potential):
            return ProblemSpec(
                grid=build_grid([1.0], [31]),
                time_grid=build_time_grid(0.5, 10),
                potential=potential,
                forcing=SourceSpec("bump", center=(0.3,), width=0.2),
                initial=SourceSpec("mode", modes=(2,)),
                penalty=0.0,
            )

        penalized = solve_penalized(make(slab_potential)).layers
        np.testing.assert_array_equal(penalized, solve_penalized(make(PotentialSpec("zero"))).layers)


# ---------------------------------------------------------------------------
# Limit scheme
# ---------------------------------------------------------------------------


class TestLimitScheme:
    def test_zero_potential_matches_unpenalized_heat(self):
        problem = _make_heat_problem(31, 20)
        limit = solve_limit(problem)
        np.testing.assert_array_equal(limit.layers, solve_penalized(problem.with_penalty(0.0)).layers)

    def test_vanishes_outside_active_sets(self, slab_problem):
        trajectory = solve_limit(slab_problem)
        masks = slab_problem.active_layers()
        assert np.all(trajectory.layers[~masks] == 0.0)
        assert trajectory.scheme == "limit"
        assert trajectory.penalty == 0.0

    def test_shrinking_active_sets_rejected(self):
        grid = build_grid([1.0], [9])
        time_grid = build_time_grid(1.0, 2)
        samples = np.zeros((3, grid.size))
        samples[1:, grid.coordinates()[:, 0] > 0.5] = 1.0
        problem = ProblemSpec(grid, time_grid, PotentialSpec.from_samples(samples, grid, time_grid))
        with pytest.raises(ContractError, match="nondecreasing"):
            solve_limit(problem)

    def test_penalized_approaches_limit(self, slab_problem):
        limit = solve_limit(slab_problem)
        errors = []
        for penalty in (1e2, 1e4):
            trajectory = solve_penalized(slab_problem.with_penalty(penalty))
            errors.append(np.max(np.abs(trajectory.final.values - limit.final.values)))
        assert errors[1] < errors[0]

    def test_layer_norms_do_not_grow_without_forcing(self, slab_problem):
        problem = ProblemSpec(
            slab_problem.grid,
            slab_problem.time_grid,
            slab_problem.potential,
            initial=slab_problem.initial,
        )
        norms = layer_norms(solve_limit(problem), "L2")
        assert norms[0] > 0
        assert np.all(np.diff(norms) <= 1e-12 * norms[0])


class TestIntrospection:
    def test_solver_list(self, slab_problem):
        solver = ParabolicSolver(slab_problem)
        assert solver.get_solver_list() == ["solve_penalized", "solve_limit"]

    def test_solver_description(self, slab_problem):
        descriptions = ParabolicSolver(slab_problem).get_solver_description()
        assert descriptions["solve_penalized"].startswith("Solve the penalized problem")

"""
Tests for the stationary penalized and limit problems.

Run with:
    pytest tests/test_stationary.py -v
"""

import numpy as np
import pytest

from degenheat.exceptions import ConfigurationError, GeometryError, UsageError
from degenheat.grid import build_grid
from degenheat.potential import PotentialSpec
from degenheat.sources import SourceSpec
from degenheat.stationary import (
    StationarySolver,
    StationarySpec,
    solve_stationary_limit,
    solve_stationary_penalized,
    stationary_alpha,
    stationary_energy,
)


def _make_step_spec(n=399, penalty=1e3):
    """a = 1 outside (0.3, 0.7), f = 1."""
    return StationarySpec.from_specs(
        build_grid([1.0], [n]),
        PotentialSpec("step_slab", center=(0.5,), radius=0.2),
        SourceSpec("constant"),
        penalty,
    )


# ---------------------------------------------------------------------------
# StationarySpec
# ---------------------------------------------------------------------------


class TestStationarySpec:
    def test_arrays_are_frozen(self):
        spec = _make_step_spec(n=19)
        with pytest.raises(ValueError):
            spec.potential[0] = 2.0

    def test_rejects_negative_potential(self):
        grid = build_grid([1.0], [3])
        with pytest.raises(ConfigurationError):
            StationarySpec(grid, [-1.0, 0.0, 0.0], [1.0, 1.0, 1.0])

    def test_rejects_wrong_length(self):
        grid = build_grid([1.0], [3])
        with pytest.raises(ConfigurationError):
            StationarySpec(grid, [0.0, 0.0], [1.0, 1.0, 1.0])

    def test_zero_set_excludes_boundary_nodes(self):
        spec = _make_step_spec(n=19)
        x = spec.grid.coordinates()[:, 0]
        # nodes 0.35 .. 0.65; 0.3 and 0.7 lie on the boundary of the slab
        assert spec.zero_set.sum() == 7
        assert x[spec.zero_set].min() == pytest.approx(0.35)
        assert x[spec.zero_set].max() == pytest.approx(0.65)
        np.testing.assert_array_equal(spec.zero_set, spec.zero_set[::-1])
        np.testing.assert_array_equal(spec.potential[~spec.zero_set], 1.0)


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


class TestStationarySolvers:
    def test_limit_solution_in_slab(self):
        u = solve_stationary_limit(_make_step_spec())
        x = u.grid.coordinates()[:, 0]
        assert u.values[np.argmin(np.abs(x - 0.5))] == pytest.approx(0.02, abs=1e-3)
        assert np.all(u.values[np.abs(x - 0.5) >= 0.2] == 0.0)

    def test_poisson_oracle_without_potential(self):
        spec = StationarySpec.from_specs(
            build_grid([1.0], [199]),
            PotentialSpec("zero"),
            SourceSpec("mode", modes=(1,), amplitude=np.pi**2),
            penalty=1e3,
        )
        x = spec.grid.coordinates()[:, 0]
        for u in (solve_stationary_penalized(spec), solve_stationary_limit(spec)):
            assert np.max(np.abs(u.values - np.sin(np.pi * x))) < 1e-3

    def test_empty_zero_set_raises(self):
        spec = StationarySpec.from_specs(
            build_grid([1.0], [19]),
            PotentialSpec("cylindrical_slab", radius=0.0),
            SourceSpec("constant"),
        )
        with pytest.raises(GeometryError):
            solve_stationary_limit(spec)

    def test_energy_equality_at_solution(self):
        spec = _make_step_spec(n=99)
        u = solve_stationary_penalized(spec)
        energy, objective = stationary_energy(spec, u)
        work = spec.grid.cell_volume * float(spec.forcing @ u.values)
        assert abs(energy - work) <= 1e-8 * abs(work)
        assert objective == pytest.approx(-work, rel=1e-8)

    def test_alpha_increases_with_penalty(self):
        alphas = [stationary_alpha(_make_step_spec(n=99, penalty=lam)) for lam in (1, 10, 100, 1000)]
        assert np.all(np.diff(alphas) > 0)

    def test_penalized_solution_minimizes_objective(self):
        spec = _make_step_spec(n=49, penalty=50.0)
        solver = StationarySolver(spec)
        u = solver.solve_penalized().values
        _, best = solver.energy(u)
        perturbation = np.random.default_rng(4).standard_normal(u.size) * 1e-3
        assert solver.energy(u + perturbation)[1] > best

    def test_penalized_converges_to_limit(self):
        limit = solve_stationary_limit(_make_step_spec(n=99))
        errors = [
            np.max(np.abs(solve_stationary_penalized(_make_step_spec(n=99, penalty=lam)).values - limit.values))
            for lam in (1e2, 1e4, 1e6)
        ]
        assert errors[0] > errors[1] > errors[2]

    def test_energy_rejects_wrong_shape(self):
        spec = _make_step_spec(n=19)
        with pytest.raises(UsageError):
            stationary_energy(spec, np.zeros(5))

    def test_solver_list(self):
        solver = StationarySolver(_make_step_spec(n=19))
        assert solver.get_solver_list() == ["solve_penalized", "solve_limit", "energy", "alpha"]

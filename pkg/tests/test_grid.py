"""
Tests for grids, the Dirichlet Laplacian and the discrete norms.

Run with:
    pytest tests/test_grid.py -v
"""

import numpy as np
import pytest

from degenheat.exceptions import ConfigurationError, UsageError
from degenheat.grid import (
    Field,
    Trajectory,
    assemble_dirichlet_laplacian,
    build_grid,
    build_time_grid,
    discrete_norm,
    gradient_inner,
    l2_inner,
    layer_norms,
)


def _make_trajectory(grid, time_grid, first_layer_value=0.0, later_value=0.0):
    layers = np.full((time_grid.step_count + 1, grid.size), later_value)
    layers[0] = first_layer_value
    return Trajectory(grid, time_grid, layers)


# ---------------------------------------------------------------------------
# Grid construction
# ---------------------------------------------------------------------------


class TestBuildGrid:
    def test_spacing_and_nodes_1d(self):
        grid = build_grid([1.0], [3])
        assert grid.spacings == (0.25,)
        assert grid.size == 3
        np.testing.assert_allclose(grid.coordinates()[:, 0], [0.25, 0.5, 0.75])

    def test_nodes_are_strictly_interior(self):
        grid = build_grid([2.0, 1.0], [7, 4])
        nodes = grid.coordinates()
        assert np.all(nodes > 0)
        assert np.all(nodes < np.array([2.0, 1.0]))

    def test_enumeration_is_c_order(self):
        grid = build_grid([1.0, 2.0], [2, 3])
        nodes = grid.coordinates()
        assert nodes.shape == (6, 2)
        np.testing.assert_allclose(nodes[1], [1 / 3, 1.0])
        np.testing.assert_allclose(nodes[3], [2 / 3, 0.5])

    @pytest.mark.parametrize(
        "extents, counts",
        [([0.0], [5]), ([-1.0], [5]), ([1.0], [0]), ([1.0, 1.0, 1.0], [2, 2, 2]), ([1.0], [2, 2])],
    )
    def test_invalid_grids_raise(self, extents, counts):
        with pytest.raises(ConfigurationError):
            build_grid(extents, counts)

    def test_refined_grid_contains_coarse_nodes(self):
        grid = build_grid([1.0, 1.0], [3, 4])
        fine = grid.refined()
        assert fine.interior_counts == (7, 9)
        np.testing.assert_allclose(
            fine.coordinates()[grid.coarse_indices()], grid.coordinates(), atol=1e-15
        )


class TestTimeGrid:
    def test_last_level_is_horizon(self):
        time_grid = build_time_grid(0.3, 7)
        assert time_grid.times()[-1] == pytest.approx(0.3, rel=5e-16)
        assert time_grid.dt == pytest.approx(0.3 / 7)

    def test_invalid_time_grid_raises(self):
        with pytest.raises(ConfigurationError):
            build_time_grid(0.0, 10)
        with pytest.raises(ConfigurationError):
            build_time_grid(1.0, 0)


class TestFieldAndTrajectory:
    def test_field_is_read_only_copy(self, line_grid):
        values = np.ones(line_grid.size)
        field = Field(line_grid, values)
        values[0] = 5.0
        assert field.values[0] == 1.0
        with pytest.raises(ValueError):
            field.values[0] = 2.0

    def test_field_rejects_bad_values(self, line_grid):
        with pytest.raises(UsageError):
            Field(line_grid, np.ones(line_grid.size + 1))
        bad = np.ones(line_grid.size)
        bad[3] = np.nan
        with pytest.raises(UsageError):
            Field(line_grid, bad)

    def test_trajectory_layer_count(self, line_grid, short_times):
        with pytest.raises(UsageError):
            Trajectory(line_grid, short_times, np.zeros((short_times.step_count, line_grid.size)))
        trajectory = _make_trajectory(line_grid, short_times, 1.0)
        assert trajectory.final.values.shape == (line_grid.size,)
        np.testing.assert_array_equal(trajectory.layer(0).values, 1.0)


# ---------------------------------------------------------------------------
# Laplacian
# ---------------------------------------------------------------------------


class TestLaplacian:
    def test_1d_stencil(self):
        grid = build_grid([1.0], [3])
        dense = assemble_dirichlet_laplacian(grid).to_dense()
        expected = 16.0 * np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], dtype=float)
        np.testing.assert_allclose(dense, expected)

    def test_2d_stencil(self):
        grid = build_grid([1.0, 2.0], [4, 3])
        h1, h2 = grid.spacings
        dense = assemble_dirichlet_laplacian(grid).to_dense()
        np.testing.assert_allclose(dense, dense.T)
        np.testing.assert_allclose(np.diag(dense), 2 / h1**2 + 2 / h2**2)
        # neighbour along the last axis, then along the first
        assert dense[0, 1] == pytest.approx(-1 / h2**2)
        assert dense[0, 3] == pytest.approx(-1 / h1**2)
        assert dense[0, 4] == 0.0

    def test_gradient_quadrature_matches_operator(self):
        grid = build_grid([1.0, 1.5], [6, 5])
        rng = np.random.default_rng(7)
        u, v = rng.standard_normal((2, grid.size))
        operator = assemble_dirichlet_laplacian(grid)
        assert gradient_inner(grid, u, v) == pytest.approx(
            grid.cell_volume * float(v @ operator.matvec(u)), rel=1e-12
        )

    def test_symmetric_and_positive_definite(self):
        grid = build_grid([1.0, 1.0], [7, 9])
        operator = assemble_dirichlet_laplacian(grid)
        matrix = operator.matrix
        assert (matrix != matrix.T).nnz == 0
        rng = np.random.default_rng(11)
        for v in rng.standard_normal((20, grid.size)):
            assert v @ operator.matvec(v) > 0

    def test_smallest_eigenvalue_1d(self):
        grid = build_grid([1.0], [99])
        h = grid.spacings[0]
        expected = (2 - 2 * np.cos(np.pi * h)) / h**2
        smallest = np.linalg.eigvalsh(assemble_dirichlet_laplacian(grid).to_dense())[0]
        assert smallest == pytest.approx(expected, rel=1e-10)

    def test_sine_eigenpair_1d(self):
        grid = build_grid([1.0], [99])
        h = grid.spacings[0]
        v = np.sin(np.pi * grid.coordinates()[:, 0])
        mu = (2 - 2 * np.cos(np.pi * h)) / h**2
        np.testing.assert_allclose(assemble_dirichlet_laplacian(grid).matvec(v), mu * v, atol=1e-9)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------


class TestDiscreteNorm:
    def test_l2_of_constant(self):
        grid = build_grid([1.0], [3])
        field = Field(grid, np.ones(3))
        assert discrete_norm(field, "L2") == pytest.approx(np.sqrt(0.75))
        assert l2_inner(grid, field.values, field.values) == pytest.approx(0.75)

    def test_l2_of_constant_on_fine_grid(self):
        grid = build_grid([1.0], [99])
        assert discrete_norm(Field(grid, np.ones(99)), "L2") ** 2 == pytest.approx(0.99, rel=1e-13)

    def test_h1semi_of_sine(self):
        grid = build_grid([1.0], [199])
        field = Field(grid, np.sin(np.pi * grid.coordinates()[:, 0]))
        assert discrete_norm(field, "H1semi") ** 2 == pytest.approx(np.pi**2 / 2, rel=0.01)

    @pytest.mark.parametrize("alpha", [-3.0, 0.5, 7.0])
    def test_l2_is_absolutely_homogeneous(self, line_grid, alpha):
        u = np.random.default_rng(5).standard_normal(line_grid.size)
        scaled = discrete_norm(Field(line_grid, alpha * u), "L2")
        assert scaled == pytest.approx(abs(alpha) * discrete_norm(Field(line_grid, u), "L2"), rel=1e-13)

    def test_triangle_inequality(self, line_grid, short_times):
        rng = np.random.default_rng(9)
        for _ in range(10):
            u, v = rng.standard_normal((2, line_grid.size))
            assert discrete_norm(Field(line_grid, u + v), "L2") <= (
                discrete_norm(Field(line_grid, u), "L2") + discrete_norm(Field(line_grid, v), "L2")
            )
            shape = (short_times.step_count + 1, line_grid.size)
            p, q = rng.standard_normal((2,) + shape)
            total = discrete_norm(Trajectory(line_grid, short_times, p + q), "L2L2")
            assert total <= discrete_norm(Trajectory(line_grid, short_times, p), "L2L2") + discrete_norm(
                Trajectory(line_grid, short_times, q), "L2L2"
            )

    def test_h1semi_counts_boundary_cells(self):
        grid = build_grid([1.0], [1])
        field = Field(grid, [1.0])
        # two cells of width 1/2, slope 2 on each
        assert discrete_norm(field, "H1semi") == pytest.approx(np.sqrt(4.0))

    def test_time_integrals_skip_initial_layer(self, line_grid, short_times):
        trajectory = _make_trajectory(line_grid, short_times, first_layer_value=3.0)
        assert discrete_norm(trajectory, "L2L2") == 0.0
        assert discrete_norm(trajectory, "L2H1semi") == 0.0
        assert discrete_norm(trajectory, "supL2") == pytest.approx(
            3.0 * np.sqrt(line_grid.size * line_grid.cell_volume)
        )

    def test_l2l2_of_constant_trajectory(self, line_grid, short_times):
        trajectory = _make_trajectory(line_grid, short_times, 1.0, 1.0)
        expected = np.sqrt(short_times.horizon * line_grid.size * line_grid.cell_volume)
        assert discrete_norm(trajectory, "L2L2") == pytest.approx(expected)

    def test_layer_norms(self, line_grid, short_times):
        trajectory = _make_trajectory(line_grid, short_times, 2.0, 1.0)
        norms = layer_norms(trajectory, "L2")
        assert norms.shape == (short_times.step_count + 1,)
        assert norms[0] == pytest.approx(2 * norms[1])

    @pytest.mark.parametrize("kind", ["L2L2", "L2H1semi", "supL2", "H2"])
    def test_field_rejects_space_time_kinds(self, line_grid, kind):
        with pytest.raises(UsageError):
            discrete_norm(Field(line_grid, np.zeros(line_grid.size)), kind)

    @pytest.mark.parametrize("kind", ["L2", "H1semi"])
    def test_trajectory_rejects_spatial_kinds(self, line_grid, short_times, kind):
        with pytest.raises(UsageError):
            discrete_norm(_make_trajectory(line_grid, short_times), kind)

"""
Reference runs at desk scale: energy bounds, convergence and decay sweeps,
the stationary suite and the distributional pairings.

These take tens of seconds each. Run with:
    pytest tests/test_acceptance.py -v -m slow
"""

import numpy as np
import pytest

from degenheat.diagnostics import MASS_DROP_TARGET, DiagnosticsManager
from degenheat.grid import build_grid, build_time_grid
from degenheat.parabolic import ProblemSpec, solve_penalized
from degenheat.potential import PotentialSpec, build_stationary_decay_geometry
from degenheat.sources import SourceSpec
from degenheat.stationary import StationarySpec, solve_stationary_limit, solve_stationary_penalized

pytestmark = pytest.mark.slow

DECADES = [1e2, 1e3, 1e4, 1e5, 1e6]
DECAY_PENALTIES = [4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0, 65536.0]
SLAB = PotentialSpec("cylindrical_slab", center=(0.5,), radius=0.2)
STEP = PotentialSpec("step_slab", center=(0.5,), radius=0.2)


@pytest.fixture(scope="module")
def reference_problem():
    """Expanding slab r(t) = 0.2 + 0.1 t on (0, 1), T = 1, n = 199, m = 400."""
    return ProblemSpec(
        grid=build_grid([1.0], [199]),
        time_grid=build_time_grid(1.0, 400),
        potential=PotentialSpec("expanding_slab", center=(0.5,), radius=0.2, growth=0.1),
        forcing=SourceSpec("bump", center=(0.5,), width=0.15, restrict_to_zero_set=True),
        initial=SourceSpec("bump", center=(0.5,), width=0.15, restrict_to_zero_set=True),
    )


@pytest.fixture(scope="module")
def decay_problem():
    """Fixed slab (0.4, 0.6), f = 0, g a bump inside the slab."""
    return ProblemSpec(
        grid=build_grid([1.0], [399]),
        time_grid=build_time_grid(0.1, 400),
        potential=PotentialSpec("cylindrical_slab", center=(0.5,), radius=0.1),
        initial=SourceSpec("bump", center=(0.5,), width=0.1, restrict_to_zero_set=True),
        cg_tol=1e-12,
    )


def _stationary(penalty, n=199, potential=SLAB):
    return StationarySpec.from_specs(
        build_grid([1.0], [n]),
        potential,
        SourceSpec("constant", restrict_to_zero_set=True),
        penalty,
        cg_tol=1e-12,
    )


def _bump(grid, center, width):
    r = np.abs(grid.coordinates()[:, 0] - center)
    return np.where(r < width, np.cos(np.pi * r / (2 * width)) ** 2, 0.0)


# ---------------------------------------------------------------------------
# Energy bounds
# ---------------------------------------------------------------------------


class TestReferenceEnergyBounds:
    @pytest.mark.parametrize("penalty", DECADES)
    def test_bound2_and_derbound(self, reference_problem, penalty):
        problem = reference_problem.with_penalty(penalty)
        report = DiagnosticsManager().check_energy_bounds(solve_penalized(problem), problem)
        assert report.record("bound2").satisfied
        assert report.record("derbound").satisfied
        assert report.record("penalization_mass").satisfied

    def test_initial_penalty_term_is_zero(self, reference_problem):
        a0 = reference_problem.potential_layers()[0]
        assert np.sum(a0 * reference_problem.initial_values() ** 2) == 0.0

    def test_bound2_has_margin(self, reference_problem):
        problem = reference_problem.with_penalty(1e4)
        report = DiagnosticsManager().check_energy_bounds(solve_penalized(problem), problem)
        assert report.record("bound2").ratio < 1.0


# ---------------------------------------------------------------------------
# Strong convergence
# ---------------------------------------------------------------------------


class TestReferenceConvergence:
    @pytest.fixture(scope="class")
    def sweep(self, reference_problem):
        return DiagnosticsManager().convergence_sweep(reference_problem, DECADES)

    def test_error_decreases(self, sweep):
        assert sweep.is_decreasing()
        assert sweep.error_order() < 0

    def test_error_drop(self, sweep):
        assert sweep.error_drop > 3

    def test_penalization_mass_falls_after_its_peak(self, sweep):
        masses = sweep.masses
        peak = int(np.argmax(masses))
        assert peak <= 1
        assert np.all(np.diff(masses[peak:]) < 0)
        assert sweep.mass_drop > 1.5

    def test_mass_drop_is_resolved(self, reference_problem, sweep):
        fine = ProblemSpec(
            reference_problem.grid.refined(),
            build_time_grid(1.0, 800),
            reference_problem.potential,
            forcing=reference_problem.forcing,
            initial=reference_problem.initial,
        )
        refined = DiagnosticsManager().convergence_sweep(fine, DECADES)
        assert refined.mass_drop == pytest.approx(sweep.mass_drop, rel=0.25)
        assert refined.mass_drop < MASS_DROP_TARGET

    def test_bound2_ratios(self, sweep):
        assert max(sweep.bound_ratios) <= 1.05


# ---------------------------------------------------------------------------
# Exponential decay
# ---------------------------------------------------------------------------


class TestReferenceDecay:
    @pytest.fixture(scope="class")
    def report(self, decay_problem):
        return DiagnosticsManager().decay_sweep(decay_problem, DECAY_PENALTIES, 0.1)

    def test_delta_matches_epsilon(self, report):
        assert report.delta == pytest.approx(0.1, abs=0.003)

    def test_fitted_slope(self, report):
        threshold = -0.8 * 2 * report.epsilon * np.sqrt(report.delta / 2)
        assert report.slope_fit <= threshold

    def test_scaled_quantity_bounded(self, report):
        assert report.bounded
        assert report.weighted_ratio <= report.slack

    def test_raw_integral_drops(self, report):
        assert report.i_eps_drop > 1e4
        assert np.all(np.diff([r.i_eps for r in report.records]) < 0)


# ---------------------------------------------------------------------------
# Stationary suite
# ---------------------------------------------------------------------------


class TestStationarySuite:
    @pytest.fixture(scope="class")
    def sweep(self):
        return DiagnosticsManager().stationary_convergence_sweep(
            _stationary(0.0, potential=STEP), DECADES, refined=_stationary(0.0, n=399, potential=STEP)
        )

    def test_limit_solution(self):
        u = solve_stationary_limit(_stationary(0.0, potential=STEP))
        x = u.grid.coordinates()[:, 0]
        assert u.values[np.argmin(np.abs(x - 0.5))] == pytest.approx(0.02, abs=1e-3)

    def test_h1_error_decreases(self, sweep):
        errors = [r.err_h1semi for r in sweep.records]
        assert np.all(np.diff(errors) < 0)
        assert errors[-1] < errors[0] / 30

    def test_refinement_floor_is_solver_level(self, sweep):
        # both grids place K_a on nodes and reproduce the quadratic limit solution
        assert sweep.floor < 1e-6
        assert sweep.floor < sweep.records[-1].err_h1semi / 100

    def test_penalization_mass_vanishes(self, sweep):
        masses = [r.pen_mass for r in sweep.records]
        assert masses[-1] < masses[0] / 100

    def test_energy_equality(self, sweep):
        assert max(r.energy_defect for r in sweep.records) < 1e-8

    def test_alpha_increases(self):
        report = DiagnosticsManager().stationary_convergence_sweep(
            _stationary(0.0), [1.0, 10.0, 100.0, 1000.0]
        )
        assert np.all(np.diff([r.alpha for r in report.records]) > 0)

    def test_decay_integrals(self):
        spec = _stationary(0.0)
        geometry = build_stationary_decay_geometry(SLAB, spec.grid, 0.05)
        report = DiagnosticsManager().stationary_decay_sweep(spec, geometry, DECADES)
        assert np.all(np.diff([r.i_eps for r in report.records]) < 0)


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------


class TestReferencePairings:
    @pytest.mark.parametrize("penalty", [1e2, 1e3, 1e4])
    def test_stationary_identity(self, penalty):
        spec = _stationary(penalty)
        phi = _bump(spec.grid, 0.85, 0.1)
        pairing = DiagnosticsManager().distributional_pairing(solve_stationary_penalized(spec), spec, phi)
        assert pairing.discrepancy <= 1e-8 * abs(pairing.value)

    def test_pairing_vanishes_as_penalty_grows(self):
        values = []
        for penalty in (1e2, 1e6):
            spec = _stationary(penalty)
            phi = _bump(spec.grid, 0.85, 0.1)
            values.append(
                DiagnosticsManager().distributional_pairing(solve_stationary_penalized(spec), spec, phi).value
            )
        assert values[1] < values[0] / 10

    @pytest.mark.parametrize("penalty", [1e2, 1e3])
    def test_parabolic_identity(self, reference_problem, penalty):
        problem = ProblemSpec(
            reference_problem.grid,
            reference_problem.time_grid,
            reference_problem.potential,
            forcing=reference_problem.forcing,
            initial=reference_problem.initial,
            penalty=penalty,
            cg_tol=1e-12,
        )
        m = problem.time_grid.step_count
        envelope = np.sin(np.pi * np.arange(m + 1) / m)
        envelope[[0, -1]] = 0.0
        phi = envelope[:, None] * _bump(problem.grid, 0.8, 0.12)[None, :]
        pairing = DiagnosticsManager().distributional_pairing(solve_penalized(problem), problem, phi)
        assert pairing.value > 0
        assert pairing.discrepancy <= 1e-8 * abs(pairing.value)

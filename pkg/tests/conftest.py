"""Shared pytest fixtures for the degenheat test suite."""

import json

import pytest

from degenheat.grid import build_grid, build_time_grid
from degenheat.parabolic import ProblemSpec
from degenheat.potential import PotentialSpec
from degenheat.sources import SourceSpec


@pytest.fixture
def line_grid():
    """1D grid of (0, 1) with 15 interior nodes."""
    return build_grid([1.0], [15])


@pytest.fixture
def short_times():
    return build_time_grid(0.1, 10)


@pytest.fixture
def slab_potential():
    """Expanding slab around 0.5: r(t) = 0.2 + 0.1 t."""
    return PotentialSpec("expanding_slab", center=(0.5,), radius=0.2, growth=0.1)


@pytest.fixture
def slab_problem(slab_potential):
    """Expanding slab problem with g and f bumps inside the vanishing set."""
    return ProblemSpec(
        grid=build_grid([1.0], [31]),
        time_grid=build_time_grid(1.0, 20),
        potential=slab_potential,
        forcing=SourceSpec("bump", center=(0.5,), width=0.15, restrict_to_zero_set=True),
        initial=SourceSpec("bump", center=(0.5,), width=0.15, restrict_to_zero_set=True),
        penalty=100.0,
    )


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment dict as JSON and return its path."""

    def _write(document, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write

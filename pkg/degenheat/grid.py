"""
Uniform tensor grids, the Dirichlet Laplacian and discrete norms.

Only interior nodes are stored; the homogeneous Dirichlet condition is encoded
by leaving boundary nodes out. Nodes are enumerated in C order over
``interior_counts`` (the last axis varies fastest), so a field reshapes to
``grid.shape`` with ``values.reshape(grid.shape)``.

The gradient quadrature uses forward differences with one one-sided cell at
each Dirichlet face, which makes ``h^N <Au, u>`` equal to the squared H1
seminorm identically.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .exceptions import ConfigurationError, UsageError
from .linalg import SparseOperator

NORM_KINDS = ("L2", "H1semi", "L2L2", "L2H1semi", "supL2")
SPACE_NORMS = ("L2", "H1semi")


@dataclass(frozen=True)
class Grid:
    """
    Uniform grid of the interior nodes of ``(0, L_1) x ... x (0, L_N)``.

    Attributes
    ----------
    extents : tuple of float
        Side lengths ``L_j``.
    interior_counts : tuple of int
        Interior node count ``n_j`` per axis; the spacing is ``L_j / (n_j + 1)``.
    """

    extents: Tuple[float, ...]
    interior_counts: Tuple[int, ...]

    def __post_init__(self):
        extents = tuple(float(e) for e in self.extents)
        counts = tuple(int(c) for c in self.interior_counts)
        if len(extents) not in (1, 2) or len(counts) != len(extents):
            raise ConfigurationError(
                f"Grid needs 1 or 2 axes with one count per extent, got extents={extents}, counts={counts}"
            )
        if any(not np.isfinite(e) or e <= 0 for e in extents):
            raise ConfigurationError(f"Extents must be positive, got {extents}")
        if any(c < 1 for c in counts):
            raise ConfigurationError(f"Interior counts must be at least 1, got {counts}")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "interior_counts", counts)

    @property
    def dimension(self) -> int:
        return len(self.extents)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.interior_counts

    @property
    def size(self) -> int:
        return int(np.prod(self.interior_counts))

    @property
    def spacings(self) -> Tuple[float, ...]:
        return tuple(L / (n + 1) for L, n in zip(self.extents, self.interior_counts))

    @property
    def cell_volume(self) -> float:
        """Lumped mass weight ``h_1 * ... * h_N``."""
        return float(np.prod(self.spacings))

    def axes(self) -> List[np.ndarray]:
        """Interior coordinates along each axis."""
        return [
            np.arange(1, n + 1) * L / (n + 1)
            for L, n in zip(self.extents, self.interior_counts)
        ]

    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape ``(size, dimension)``, in enumeration order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def refined(self) -> "Grid":
        """Grid with every spacing halved (``n -> 2n + 1``); coarse nodes stay nodes."""
        return Grid(self.extents, tuple(2 * n + 1 for n in self.interior_counts))

    def coarse_indices(self) -> np.ndarray:
        """Indices, in ``self.refined()``, of the nodes of this grid."""
        fine_shape = tuple(2 * n + 1 for n in self.interior_counts)
        picks = np.meshgrid(
            *[np.arange(1, 2 * n + 1, 2) for n in self.interior_counts], indexing="ij"
        )
        return np.ravel_multi_index(tuple(p.ravel() for p in picks), fine_shape)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time levels ``t_k = k * dt``, ``k = 0..m``, on ``[0, T]``."""

    horizon: float
    step_count: int

    def __post_init__(self):
        if not np.isfinite(self.horizon) or self.horizon <= 0:
            raise ConfigurationError(f"Time horizon must be positive, got {self.horizon}")
        if int(self.step_count) < 1:
            raise ConfigurationError(f"Step count must be at least 1, got {self.step_count}")
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "step_count", int(self.step_count))

    @property
    def dt(self) -> float:
        return self.horizon / self.step_count

    def times(self) -> np.ndarray:
        return np.arange(self.step_count + 1) * self.dt

    def time(self, k: int) -> float:
        return k * self.dt


def _frozen_values(values, expected: Tuple[int, ...], what: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    if array.shape != expected:
        raise UsageError(f"{what} has shape {array.shape}, expected {expected}")
    if not np.all(np.isfinite(array)):
        raise UsageError(f"{what} contains non-finite values")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Field:
    """One value per interior node of ``grid``; values are copied and read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen_values(self.values, (self.grid.size,), "Field")
        )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Space-time field ``layers[k, i] ~ u(x_i, t_k)`` for ``k = 0..m``.

    Attributes
    ----------
    grid, time_grid
        Discretization the layers live on.
    layers : np.ndarray
        Array of shape ``(m + 1, grid.size)``; layer 0 is the initial datum.
    scheme : str
        ``"penalized"`` or ``"limit"``, the solver that produced the layers.
    penalty : float
        ``lambda`` of a penalized run, 0 for limit runs.
    """

    grid: Grid
    time_grid: TimeGrid
    layers: np.ndarray
    scheme: str = "penalized"
    penalty: float = 0.0

    def __post_init__(self):
        expected = (self.time_grid.step_count + 1, self.grid.size)
        object.__setattr__(
            self, "layers", _frozen_values(self.layers, expected, "Trajectory layers")
        )

    def layer(self, k: int) -> Field:
        return Field(self.grid, self.layers[k])

    @property
    def final(self) -> Field:
        return self.layer(self.time_grid.step_count)


def build_grid(extents: Sequence[float], interior_counts: Sequence[int]) -> Grid:
    """
    Build a grid from side lengths and interior node counts.

    Raises
    ------
    ConfigurationError
        If an extent is not positive or a count is below 1.
    """
    return Grid(tuple(extents), tuple(interior_counts))


def build_time_grid(horizon: float, step_count: int) -> TimeGrid:
    return TimeGrid(horizon, step_count)


def _second_difference(n: int, h: float) -> sparse.csr_matrix:
    off = np.full(n - 1, -1.0 / h**2)
    return sparse.diags([off, np.full(n, 2.0 / h**2), off], [-1, 0, 1], format="csr")


def assemble_dirichlet_laplacian(grid: Grid) -> SparseOperator:
    """
    Discrete ``-Laplace`` with homogeneous Dirichlet data.

    1D: tridiagonal with ``2/h^2`` on the diagonal and ``-1/h^2`` off it.
    2D: the 5-point stencil, built as ``T_1 (x) I + I (x) T_2``.
    """
    blocks = [_second_difference(n, h) for n, h in zip(grid.interior_counts, grid.spacings)]
    if grid.dimension == 1:
        return SparseOperator(blocks[0])
    n1, n2 = grid.interior_counts
    laplacian = sparse.kron(blocks[0], sparse.identity(n2), format="csr") + sparse.kron(
        sparse.identity(n1), blocks[1], format="csr"
    )
    return SparseOperator(laplacian)


def forward_differences(grid: Grid, values: np.ndarray) -> List[np.ndarray]:
    """
    Forward difference quotients along each axis, boundary zeros included.

    Along an axis with ``n`` interior nodes this returns ``n + 1`` quotients
    per line: the first and last use the Dirichlet zero outside the grid.
    """
    u = np.asarray(values, dtype=np.float64).reshape(grid.shape)
    quotients = []
    for axis, h in enumerate(grid.spacings):
        pad = [(0, 0)] * grid.dimension
        pad[axis] = (1, 1)
        padded = np.pad(u, pad)
        quotients.append(np.diff(padded, axis=axis) / h)
    return quotients


def gradient_inner(grid: Grid, u: np.ndarray, v: np.ndarray) -> float:
    """Discrete ``int grad u . grad v``, consistent with the assembled Laplacian."""
    total = 0.0
    for du, dv in zip(forward_differences(grid, u), forward_differences(grid, v)):
        total += float(np.sum(du * dv))
    return total * grid.cell_volume


def l2_inner(grid: Grid, u: np.ndarray, v: np.ndarray) -> float:
    return float(np.dot(u, v)) * grid.cell_volume


def _space_norm_squared(grid: Grid, values: np.ndarray, kind: str) -> float:
    if kind == "L2":
        return l2_inner(grid, values, values)
    return gradient_inner(grid, values, values)


def layer_norms(trajectory: Trajectory, kind: str) -> np.ndarray:
    """Spatial norm (``L2`` or ``H1semi``) of every layer ``k = 0..m``."""
    if kind not in SPACE_NORMS:
        raise UsageError(f"Layer norms take a spatial kind {SPACE_NORMS}, got '{kind}'")
    return np.sqrt(
        [_space_norm_squared(trajectory.grid, layer, kind) for layer in trajectory.layers]
    )


def discrete_norm(subject: Union[Field, Trajectory], kind: str) -> float:
    """
    Discrete norm of a field or trajectory.

    Parameters
    ----------
    subject : Field or Trajectory
        Quantity to measure.
    kind : str
        ``L2`` and ``H1semi`` apply to fields. ``L2L2``, ``L2H1semi`` and
        ``supL2`` apply to trajectories: the first two integrate the squared
        spatial norm over layers ``1..m`` with weight ``dt``, ``supL2`` is the
        largest layer ``L2`` norm over ``0..m``.

    Returns
    -------
    float
        The non-negative norm value.

    Raises
    ------
    UsageError
        If ``kind`` is unknown or does not apply to ``subject``.
    """
    if kind not in NORM_KINDS:
        raise UsageError(f"Unknown norm kind '{kind}', expected one of {NORM_KINDS}")
    if isinstance(subject, Field):
        if kind not in SPACE_NORMS:
            raise UsageError(f"Norm '{kind}' needs a Trajectory, got a Field")
        return float(np.sqrt(_space_norm_squared(subject.grid, subject.values, kind)))
    if not isinstance(subject, Trajectory):
        raise UsageError(f"Cannot take a norm of {type(subject).__name__}")
    if kind in SPACE_NORMS:
        raise UsageError(f"Norm '{kind}' needs a Field; use a space-time kind for a Trajectory")

    if kind == "supL2":
        return float(np.max(layer_norms(subject, "L2")))
    spatial = "L2" if kind == "L2L2" else "H1semi"
    squares = layer_norms(subject, spatial)[1:] ** 2
    return float(np.sqrt(subject.time_grid.dt * np.sum(squares)))

"""
Potential families ``a(x, t) >= 0``, their vanishing sets and decay geometry.

Analytic families are built from a radial coordinate ``rho(x)`` and a
radius ``r(t) = r0 + growth * t``:

- ``zero``: ``a = 0``; the vanishing set is all of the cylinder.
- ``cylindrical_slab``: ``a = amplitude * max(0, |x_1 - c_1| - r0)``, time independent.
- ``expanding_slab``: the same with a growing radius.
- ``expanding_disk``: ``a = amplitude * max(0, |x - c| - r(t))`` (Euclidean in ``x``).
- ``distance_to_set``: ``a = amplitude * dist((x, t), closure(O))`` where ``O``
  is the expanding slab region; the space-time distance construction.
- ``step_slab``: ``a = amplitude`` outside the slab and ``0`` inside; not Lipschitz.
- ``grid_sampled``: values on a space-time lattice, multilinear in between.

Every analytic vanishing set is convex in space-time, so distances to it and
to its neighbourhoods have closed forms. ``grid_sampled`` falls back to a
Euclidean distance transform over the samples.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.interpolate import RegularGridInterpolator

from .exceptions import ConfigurationError, GeometryError, UsageError
from .grid import Grid, TimeGrid

logger = logging.getLogger(__name__)

POTENTIAL_FAMILIES = (
    "zero",
    "cylindrical_slab",
    "expanding_slab",
    "expanding_disk",
    "distance_to_set",
    "step_slab",
    "grid_sampled",
)
SLAB_FAMILIES = ("cylindrical_slab", "expanding_slab", "distance_to_set", "step_slab")
ZERO_THRESHOLD = 1e-14
# nodes within this relative distance of the radius count as boundary nodes
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """
    A potential family with its parameters.

    Attributes
    ----------
    family : str
        One of :data:`POTENTIAL_FAMILIES`.
    center : tuple of float
        Center of the vanishing set. Slabs use the first coordinate only.
    radius : float
        Initial half-width (slabs) or radius (disk) ``r0 >= 0``.
    growth : float
        Growth rate ``r'(t) >= 0``; must be 0 for ``cylindrical_slab``.
    amplitude : float
        Scale factor, ``> 0`` for every family except ``zero``.
    samples : np.ndarray, optional
        ``grid_sampled`` only: values of shape ``(m + 1, grid.size)``.
    sample_grid, sample_time_grid : Grid, TimeGrid, optional
        ``grid_sampled`` only: the lattice ``samples`` live on.
    declared_monotone : bool
        ``grid_sampled`` only: whether ``a`` is declared non-increasing in time.
    """

    family: str
    center: Tuple[float, ...] = (0.5,)
    radius: float = 0.0
    growth: float = 0.0
    amplitude: float = 1.0
    samples: Optional[np.ndarray] = None
    sample_grid: Optional[Grid] = None
    sample_time_grid: Optional[TimeGrid] = None
    declared_monotone: bool = False
    _interpolator: Optional[RegularGridInterpolator] = field(
        default=None, init=False, repr=False
    )

    def __post_init__(self):
        if self.family not in POTENTIAL_FAMILIES:
            raise ConfigurationError(
                f"Unknown potential family '{self.family}', expected one of {POTENTIAL_FAMILIES}"
            )
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius < 0 or self.growth < 0:
            raise ConfigurationError(
                f"Radius and growth must be non-negative, got r0={self.radius}, growth={self.growth}"
            )
        if self.family == "cylindrical_slab" and self.growth != 0:
            raise ConfigurationError("cylindrical_slab is time independent; growth must be 0")
        if self.family not in ("zero", "grid_sampled"):
            if len(self.center) not in (1, 2):
                raise ConfigurationError(f"Center must have 1 or 2 coordinates, got {self.center}")
            if not self.amplitude > 0:
                raise ConfigurationError(
                    f"Amplitude must be positive for '{self.family}'; use the 'zero' family for a = 0"
                )
        if self.family == "grid_sampled":
            self._init_samples()

    def _init_samples(self):
        if self.samples is None or self.sample_grid is None or self.sample_time_grid is None:
            raise ConfigurationError(
                "grid_sampled needs samples, sample_grid and sample_time_grid"
            )
        grid, time_grid = self.sample_grid, self.sample_time_grid
        expected = (time_grid.step_count + 1, grid.size)
        samples = np.array(self.samples, dtype=np.float64)
        if samples.size != expected[0] * expected[1]:
            raise ConfigurationError(
                f"grid_sampled needs {expected[0]} x {expected[1]} samples, got {samples.size}"
            )
        samples = samples.reshape(expected)
        if not np.all(np.isfinite(samples)):
            raise ConfigurationError("grid_sampled samples must be finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

        # pad with edge values so the interpolant covers the closed domain
        lattice = samples.reshape((expected[0],) + grid.shape)
        padded = np.pad(lattice, [(0, 0)] + [(1, 1)] * grid.dimension, mode="edge")
        axes = [time_grid.times()] + [
            np.concatenate(([0.0], axis, [L])) for axis, L in zip(grid.axes(), grid.extents)
        ]
        object.__setattr__(
            self, "_interpolator", RegularGridInterpolator(axes, padded, method="linear")
        )

    @classmethod
    def from_samples(
        cls,
        samples: np.ndarray,
        grid: Grid,
        time_grid: TimeGrid,
        monotone: bool = False,
    ) -> "PotentialSpec":
        """Wrap lattice values as a ``grid_sampled`` potential."""
        return cls(
            "grid_sampled",
            samples=samples,
            sample_grid=grid,
            sample_time_grid=time_grid,
            declared_monotone=monotone,
        )

    @property
    def monotone_flag(self) -> bool:
        """Whether ``a`` is non-increasing in time (Assumption (A))."""
        if self.family == "grid_sampled":
            return bool(self.declared_monotone)
        # every analytic family has growth >= 0
        return True

    @property
    def lipschitz(self) -> float:
        """Declared bound on the difference quotients of ``a`` along any axis."""
        if self.family == "zero":
            return 0.0
        if self.family == "step_slab":
            return float("inf")
        if self.family == "distance_to_set":
            return self.amplitude
        if self.family == "grid_sampled":
            return _max_quotient(self.samples, self.sample_grid, self.sample_time_grid)
        return self.amplitude * float(np.hypot(1.0, self.growth))

    @property
    def is_convex(self) -> bool:
        """True when the vanishing set has a closed-form convex description."""
        return self.family not in ("zero", "grid_sampled")

    def radius_at(self, t: float) -> float:
        return self.radius + self.growth * t

    def radial(self, points: np.ndarray) -> np.ndarray:
        """Radial coordinate of ``points`` (shape ``(P, N)``) about the center."""
        points = np.atleast_2d(points)
        if self.family == "expanding_disk":
            if points.shape[1] != len(self.center):
                raise UsageError(
                    f"Disk center {self.center} does not match dimension {points.shape[1]}"
                )
            return np.linalg.norm(points - np.asarray(self.center), axis=1)
        return np.abs(points[:, 0] - self.center[0])


# ---------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------


def _evaluate(spec: PotentialSpec, points: np.ndarray, t: float, horizon: float) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if spec.family == "zero":
        return np.zeros(points.shape[0])
    if spec.family == "grid_sampled":
        query = np.column_stack([np.full(points.shape[0], t), points])
        return spec._interpolator(query)
    margin = spec.radial(points) - spec.radius_at(t)
    if spec.family == "step_slab":
        return np.where(margin >= -_boundary_slack(spec.radius_at(t)), spec.amplitude, 0.0)
    if spec.family == "distance_to_set":
        return spec.amplitude * _cone_distance(spec, spec.radial(points), t, horizon)
    return spec.amplitude * np.maximum(margin, 0.0)


def eval_potential(
    spec: PotentialSpec,
    point: Sequence[float],
    t: float,
    grid: Optional[Grid] = None,
    time_grid: Optional[TimeGrid] = None,
) -> float:
    """
    Evaluate ``a(x, t)`` at one point.

    Parameters
    ----------
    spec : PotentialSpec
        Potential to evaluate.
    point : sequence of float
        Spatial point ``x``.
    t : float
        Time.
    grid, time_grid : optional
        Domain of the problem. When given, ``x`` must lie in the closed box
        and ``t`` in ``[0, T]``. ``grid_sampled`` always checks its own lattice.

    Returns
    -------
    float
        ``a(x, t) >= 0``; exact for analytic families, multilinear for ``grid_sampled``.
    """
    x = np.asarray(point, dtype=np.float64).ravel()
    if spec.family == "grid_sampled":
        grid = grid or spec.sample_grid
        time_grid = time_grid or spec.sample_time_grid
    if grid is not None:
        if x.size != grid.dimension or np.any(x < 0) or np.any(x > np.asarray(grid.extents)):
            raise UsageError(f"Point {tuple(x)} lies outside the domain {grid.extents}")
    if t < 0 or (time_grid is not None and t > time_grid.horizon):
        raise UsageError(f"Time {t} lies outside [0, T]")
    horizon = time_grid.horizon if time_grid is not None else np.inf
    return float(_evaluate(spec, x[None, :], t, horizon)[0])


def sample_potential_at(
    spec: PotentialSpec, grid: Grid, t: float, horizon: float = np.inf
) -> np.ndarray:
    """``a(x_i, t)`` at every node."""
    return _evaluate(spec, grid.coordinates(), t, horizon)


def sample_potential(spec: PotentialSpec, grid: Grid, time_grid: TimeGrid) -> np.ndarray:
    """``a(x_i, t_k)`` for all levels, shape ``(m + 1, grid.size)``."""
    if (
        spec.family == "grid_sampled"
        and grid == spec.sample_grid
        and time_grid == spec.sample_time_grid
    ):
        return spec.samples.copy()
    nodes = grid.coordinates()
    return np.stack(
        [_evaluate(spec, nodes, t, time_grid.horizon) for t in time_grid.times()]
    )


# ---------------------------------------------------------------------
# Vanishing sets and distances
# ---------------------------------------------------------------------


def zero_set_interior(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Nodes where ``a`` vanishes at the node and at every grid neighbour."""
    zero = (values < ZERO_THRESHOLD).reshape(grid.shape)
    structure = ndimage.generate_binary_structure(grid.dimension, 1)
    return ndimage.binary_erosion(zero, structure=structure, border_value=1).ravel()


def _boundary_slack(radius: float) -> float:
    return BOUNDARY_TOL * max(1.0, radius)


def active_mask(spec: PotentialSpec, grid: Grid, t: float) -> np.ndarray:
    """
    Node mask of ``Omega_a(t)``, the interior of the vanishing set at time ``t``.

    Analytic families use their closed-form open set; ``grid_sampled`` requires
    ``a`` to vanish at the node and at all its neighbours.
    """
    if spec.family == "zero":
        return np.ones(grid.size, dtype=bool)
    if spec.family == "grid_sampled":
        return zero_set_interior(_evaluate(spec, grid.coordinates(), t, t), grid)
    radius = spec.radius_at(t)
    return spec.radial(grid.coordinates()) < radius - _boundary_slack(radius)


def active_masks(spec: PotentialSpec, grid: Grid, time_grid: TimeGrid) -> np.ndarray:
    """``active_mask`` at every level, shape ``(m + 1, grid.size)``."""
    return np.stack([active_mask(spec, grid, t) for t in time_grid.times()])


def _cone_distance(spec: PotentialSpec, radial: np.ndarray, t, horizon: float) -> np.ndarray:
    """
    Space-time distance from ``(radial, t)`` to ``{r <= r0 + growth * s, 0 <= s <= T}``.

    ``horizon`` may be infinite, which drops the top of the set.

    The set is convex and symmetric about the center, so the distance reduces
    to the half plane of the radial coordinate.
    """
    radial = np.asarray(radial, dtype=np.float64)
    if spec.growth == 0:
        return np.maximum(radial - spec.radius, 0.0)
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), radial.shape)
    # nearest point (r0 + growth*s, s) on the slanted edge, s clipped to [0, T]
    w_r = radial - spec.radius
    s = np.clip((w_r * spec.growth + t) / (1.0 + spec.growth**2), 0.0, horizon)
    distance = np.hypot(w_r - spec.growth * s, t - s)
    inside = radial <= spec.radius + spec.growth * t
    return np.where(inside, 0.0, distance)


def zero_set_distance(spec: PotentialSpec, grid: Grid, time_grid: TimeGrid) -> np.ndarray:
    """
    Euclidean space-time distance from every sample to ``closure(O_a)``.

    Returns
    -------
    np.ndarray
        Shape ``(m + 1, grid.size)``.

    Raises
    ------
    GeometryError
        If ``O_a`` is empty.
    """
    layers = time_grid.step_count + 1
    if spec.family == "zero":
        return np.zeros((layers, grid.size))
    if spec.family == "grid_sampled":
        masks = active_masks(spec, grid, time_grid)
        if not masks.any():
            raise GeometryError("The vanishing set O_a is empty on the sample lattice")
        outside = ~masks.reshape((layers,) + grid.shape)
        distance = ndimage.distance_transform_edt(
            outside, sampling=(time_grid.dt,) + grid.spacings
        )
        return distance.reshape(layers, grid.size)
    if spec.radius == 0 and spec.growth == 0:
        raise GeometryError(f"The vanishing set O_a of '{spec.family}' is empty (r0 = growth = 0)")
    radial = spec.radial(grid.coordinates())
    return np.stack(
        [_cone_distance(spec, radial, t, time_grid.horizon) for t in time_grid.times()]
    )


def spatial_zero_set_distance(spec: PotentialSpec, grid: Grid, t: float = 0.0) -> np.ndarray:
    """Spatial distance from every node to ``closure(K_a)`` at time ``t``."""
    if spec.family == "zero":
        return np.zeros(grid.size)
    if spec.family == "grid_sampled":
        mask = active_mask(spec, grid, t)
        if not mask.any():
            raise GeometryError("The interior of K_a is empty at grid resolution")
        distance = ndimage.distance_transform_edt(
            ~mask.reshape(grid.shape), sampling=grid.spacings
        )
        return distance.ravel()
    if spec.radius_at(t) == 0:
        raise GeometryError(f"The interior of K_a is empty for '{spec.family}' at t={t}")
    return np.maximum(spec.radial(grid.coordinates()) - spec.radius_at(t), 0.0)


# ---------------------------------------------------------------------
# Decay geometry
# ---------------------------------------------------------------------


def _lattice(values: np.ndarray, grid: Grid) -> np.ndarray:
    return values.reshape((values.shape[0],) + grid.shape)


def _trimmed_quotients(
    values: np.ndarray, grid: Grid, dt: Optional[float]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Time quotients and squared spatial gradient on a common sub-lattice.

    ``values`` has shape ``(layers, grid.size)``. Each forward quotient is
    trimmed by one sample along every other axis so all of them sit on the
    same points. With ``dt`` None (one layer) the time quotient is zero.
    """
    lattice = _lattice(values, grid)
    ndim = lattice.ndim

    def trim(q, keep_axis):
        index = tuple(
            slice(None) if axis == keep_axis else slice(None, -1) for axis in range(ndim)
        )
        return q[index]

    if dt is None:
        lattice = np.concatenate([lattice, lattice], axis=0)
        time_q = np.zeros_like(lattice[:-1])
    else:
        time_q = np.diff(lattice, axis=0) / dt
    time_q = trim(time_q, 0)
    grad_sq = np.zeros_like(time_q)
    for axis, h in enumerate(grid.spacings):
        grad_sq = grad_sq + trim(np.diff(lattice, axis=axis + 1) / h, axis + 1) ** 2
    return time_q, grad_sq


def _max_quotient(samples: np.ndarray, grid: Grid, time_grid: TimeGrid) -> float:
    lattice = _lattice(samples, grid)
    steps = (time_grid.dt,) + grid.spacings
    largest = 0.0
    for axis, step in enumerate(steps):
        if lattice.shape[axis] > 1:
            largest = max(largest, float(np.max(np.abs(np.diff(lattice, axis=axis)))) / step)
    return largest


def _weight_scale(core_distance: np.ndarray, delta: float, grid: Grid, dt: Optional[float]) -> float:
    """
    Largest ``kappa <= sqrt(delta/2)`` with ``kappa*|d_t D| + kappa^2*|grad D|^2 <= delta/2``.

    ``D`` is the distance to the complement of the core set; when ``D`` does not
    depend on time the answer is ``sqrt(delta/2)`` because ``D`` is 1-Lipschitz.
    """
    kappa = np.sqrt(delta / 2)
    time_q, grad_sq = _trimmed_quotients(core_distance, grid, dt)
    time_q = np.abs(time_q).ravel()
    grad_sq = grad_sq.ravel()
    moving = time_q > 0
    if not moving.any():
        return float(kappa)
    with np.errstate(divide="ignore", invalid="ignore"):
        roots = np.where(
            grad_sq > 0,
            (-time_q + np.sqrt(time_q**2 + 2 * delta * grad_sq)) / (2 * grad_sq),
            delta / (2 * time_q),
        )
    roots = roots[moving | (grad_sq > 0)]
    return float(min(kappa, np.min(roots))) if roots.size else float(kappa)


@dataclass(frozen=True, eq=False)
class DecayGeometry:
    """
    Sets and weights derived from a distance ``epsilon`` to the vanishing set.

    Arrays have shape ``(layers, grid.size)``: one row per time level, or a
    single row for the stationary geometry.

    Attributes
    ----------
    epsilon : float
    distance : np.ndarray
        Distance of each sample to the closure of the vanishing set.
    inner_mask, core_mask, fit_mask : np.ndarray
        ``distance > epsilon``, ``> 2 epsilon`` and ``> 3 epsilon``.
    delta : float
        Minimum of ``a`` over the ``inner_mask`` samples.
    cutoff : np.ndarray
        ``eta = clip((distance - epsilon) / epsilon, 0, 1)``.
    weight : np.ndarray
        ``rho = weight_scale * dist(., complement of core_mask)``.
    weight_scale : float
        ``sqrt(delta/2)`` unless a moving set forces a smaller value.
    c_eps : float
        ``epsilon * min a`` over ``distance > epsilon / 2``.
    """

    epsilon: float
    grid: Grid
    time_grid: Optional[TimeGrid]
    distance: np.ndarray
    inner_mask: np.ndarray
    core_mask: np.ndarray
    fit_mask: np.ndarray
    delta: float
    cutoff: np.ndarray
    weight: np.ndarray
    weight_scale: float
    c_eps: float

    @property
    def stationary(self) -> bool:
        return self.time_grid is None

    @property
    def _dt(self) -> Optional[float]:
        return None if self.time_grid is None else self.time_grid.dt

    def check_invariants(self, tol: float = 1e-12) -> Dict[str, bool]:
        """
        Evaluate the sampled invariants of the cutoff and the weight.

        Returns
        -------
        dict
            Invariant name to ``True`` when it holds at every sample.
        """
        eta, rho = self.cutoff, self.weight
        eta_t, eta_grad_sq = _trimmed_quotients(eta, self.grid, self._dt)
        rho_t, rho_grad_sq = _trimmed_quotients(rho, self.grid, self._dt)
        eta_rate = np.abs(eta_t) + np.sqrt(eta_grad_sq)
        rho_rate = np.abs(rho_t) + rho_grad_sq
        return {
            "delta_positive": self.delta > 0,
            "cutoff_range": bool(np.all((eta >= 0) & (eta <= 1))),
            "cutoff_one_on_core": bool(np.all(eta[self.core_mask] == 1.0)),
            "cutoff_zero_outside_inner": bool(np.all(eta[~self.inner_mask] == 0.0)),
            "cutoff_lipschitz": bool(np.all(eta_rate <= (2.0 / self.epsilon) * (1 + tol))),
            "weight_nonnegative": bool(np.all(rho >= 0)),
            "weight_zero_off_core": bool(np.all(rho[~self.core_mask] == 0.0)),
            "weight_rate": bool(np.all(rho_rate <= (self.delta / 2) * (1 + tol) + tol)),
        }


def _assemble_geometry(
    epsilon: float,
    grid: Grid,
    time_grid: Optional[TimeGrid],
    distance: np.ndarray,
    potential: np.ndarray,
    convex: bool,
) -> DecayGeometry:
    inner = distance > epsilon
    core = distance > 2 * epsilon
    fit = distance > 3 * epsilon
    if not core.any():
        raise GeometryError(
            f"A_2eps is empty at grid resolution for epsilon={epsilon}; "
            "use a smaller epsilon or a finer grid"
        )
    delta = float(np.min(potential[inner]))
    if delta <= 0:
        raise GeometryError(f"min of a over A_eps is {delta}; the potential must be positive there")
    c_eps = epsilon * float(np.min(potential[distance > epsilon / 2]))
    cutoff = np.clip((distance - epsilon) / epsilon, 0.0, 1.0)

    if convex:
        core_distance = np.maximum(distance - 2 * epsilon, 0.0)
    else:
        layers = distance.shape[0]
        steps = grid.spacings if time_grid is None else (time_grid.dt,) + grid.spacings
        lattice = core.reshape(grid.shape) if time_grid is None else _lattice(core, grid)
        core_distance = ndimage.distance_transform_edt(lattice, sampling=steps)
        core_distance = core_distance.reshape(layers, grid.size)

    dt = None if time_grid is None else time_grid.dt
    kappa = _weight_scale(core_distance, delta, grid, dt)
    logger.debug(f"Decay geometry eps={epsilon}: delta={delta:.4g}, kappa={kappa:.4g}, c_eps={c_eps:.4g}")

    frozen = []
    for array in (distance, inner, core, fit, cutoff, kappa * core_distance):
        array = np.array(array)
        array.flags.writeable = False
        frozen.append(array)
    distance, inner, core, fit, cutoff, weight = frozen
    return DecayGeometry(
        epsilon=epsilon,
        grid=grid,
        time_grid=time_grid,
        distance=distance,
        inner_mask=inner,
        core_mask=core,
        fit_mask=fit,
        delta=delta,
        cutoff=cutoff,
        weight=weight,
        weight_scale=kappa,
        c_eps=c_eps,
    )


def build_decay_geometry(
    spec: PotentialSpec, grid: Grid, time_grid: TimeGrid, epsilon: float
) -> DecayGeometry:
    """
    Space-time decay geometry at distance ``epsilon`` from ``O_a``.

    Parameters
    ----------
    spec : PotentialSpec
        Potential with a nonempty vanishing set.
    grid, time_grid : Grid, TimeGrid
        Sampling lattice.
    epsilon : float
        Positive distance.

    Returns
    -------
    DecayGeometry
        Masks, ``delta``, cutoff, weight and ``c_eps`` on the lattice.

    Raises
    ------
    GeometryError
        If ``O_a`` or ``A_2eps`` is empty at grid resolution.
    """
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    distance = zero_set_distance(spec, grid, time_grid)
    potential = sample_potential(spec, grid, time_grid)
    return _assemble_geometry(epsilon, grid, time_grid, distance, potential, spec.is_convex)


def build_stationary_decay_geometry(
    spec: PotentialSpec, grid: Grid, epsilon: float, t: float = 0.0, horizon: Optional[float] = None
) -> DecayGeometry:
    """Spatial decay geometry of ``a(., t)`` around ``K_a``; one row per array."""
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    distance = spatial_zero_set_distance(spec, grid, t)[None, :]
    horizon = np.inf if horizon is None else horizon
    potential = sample_potential_at(spec, grid, t, horizon)[None, :]
    return _assemble_geometry(epsilon, grid, None, distance, potential, spec.is_convex)


def verify_potential(
    spec: PotentialSpec, grid: Grid, time_grid: TimeGrid, tol: float = 1e-12
) -> Dict[str, bool]:
    """
    Check the sampled invariants of a potential.

    Returns
    -------
    dict
        ``nonnegative``, ``monotone`` (only meaningful with ``monotone_flag``;
        ``True`` otherwise) and ``lipschitz``.
    """
    samples = sample_potential(spec, grid, time_grid)
    monotone = True
    if spec.monotone_flag:
        monotone = bool(np.all(np.diff(samples, axis=0) <= tol))
    lipschitz = _max_quotient(samples, grid, time_grid) <= spec.lipschitz * (1 + 1e-9) + tol
    return {
        "nonnegative": bool(np.all(samples >= 0)),
        "monotone": monotone,
        "lipschitz": bool(lipschitz),
    }

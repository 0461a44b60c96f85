"""
Analytic families for the forcing ``f(x, t)`` and the initial datum ``g(x)``.

Sources are time independent; a forcing may be restricted to the vanishing
set ``O_a`` (and so becomes time dependent through the active mask), an
initial datum to ``Omega_a(0)``.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import ConfigurationError
from .grid import Grid

SOURCE_KINDS = ("zero", "mode", "bump", "constant")


@dataclass(frozen=True)
class SourceSpec:
    """
    A source term sampled at grid nodes.

    Attributes
    ----------
    kind : str
        ``zero``, ``mode`` (product of ``sin(k_j pi x_j / L_j)``), ``bump``
        (``cos^2`` bump of radius ``width`` around ``center``) or ``constant``.
    modes : tuple of int
        Wave numbers of a ``mode``, one per axis (missing axes use 1).
    center, width : for ``bump``.
    amplitude : float
        Multiplies the shape; for a normalized mode it is the L2 norm.
    normalize : bool
        ``mode`` only: scale to unit discrete L2 norm before ``amplitude``.
    restrict_to_zero_set : bool
        Zero the source outside the active set (``O_a`` for a forcing,
        ``Omega_a(0)`` for an initial datum).
    """

    kind: str = "zero"
    modes: Tuple[int, ...] = (1,)
    center: Tuple[float, ...] = (0.5,)
    width: float = 0.1
    amplitude: float = 1.0
    normalize: bool = False
    restrict_to_zero_set: bool = False

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ConfigurationError(f"Unknown source kind '{self.kind}', expected one of {SOURCE_KINDS}")
        object.__setattr__(self, "modes", tuple(int(k) for k in self.modes))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.kind == "mode" and any(k < 1 for k in self.modes):
            raise ConfigurationError(f"Mode numbers must be positive, got {self.modes}")
        if self.kind == "bump" and not self.width > 0:
            raise ConfigurationError(f"Bump width must be positive, got {self.width}")
        if not np.isfinite(self.amplitude):
            raise ConfigurationError("Source amplitude must be finite")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.amplitude == 0

    def scaled(self, factor: float) -> "SourceSpec":
        """The same source with ``amplitude`` multiplied by ``factor``."""
        return SourceSpec(
            self.kind,
            self.modes,
            self.center,
            self.width,
            self.amplitude * factor,
            self.normalize,
            self.restrict_to_zero_set,
        )

    def sample(self, grid: Grid, mask: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Node values of the source.

        Parameters
        ----------
        grid : Grid
            Nodes to sample at.
        mask : np.ndarray, optional
            Active set applied when ``restrict_to_zero_set`` is set.
        """
        nodes = grid.coordinates()
        if self.kind == "zero":
            values = np.zeros(grid.size)
        elif self.kind == "constant":
            values = np.full(grid.size, self.amplitude)
        elif self.kind == "mode":
            modes = self.modes + (1,) * (grid.dimension - len(self.modes))
            values = np.ones(grid.size)
            for axis, (k, L) in enumerate(zip(modes, grid.extents)):
                values = values * np.sin(k * np.pi * nodes[:, axis] / L)
            if self.normalize:
                values = values / np.sqrt(grid.cell_volume * np.dot(values, values))
            values = self.amplitude * values
        else:
            center = np.asarray(self.center + (0.5,) * (grid.dimension - len(self.center)))
            r = np.linalg.norm(nodes - center[: grid.dimension], axis=1)
            values = np.where(
                r < self.width, self.amplitude * np.cos(np.pi * r / (2 * self.width)) ** 2, 0.0
            )
        if self.restrict_to_zero_set and mask is not None:
            values = np.where(mask, values, 0.0)
        return values

"""
Exception hierarchy for degenheat.

Every error raised by the library derives from :class:`DegenHeatError`. The
command line runner maps each family to its exit code through
its ``exit_code`` attribute; nothing inside the library catches these.
"""

from typing import Optional

import numpy as np


class DegenHeatError(Exception):
    """Base class for all degenheat errors."""

    exit_code = 1


class ConfigurationError(DegenHeatError, ValueError):
    """Invalid construction input: bad extents, unknown families, malformed config files."""

    exit_code = 2


class UsageError(DegenHeatError, ValueError):
    """An operation was called outside its contract (shapes, signs, incompatible kinds)."""

    exit_code = 2


class ContractError(DegenHeatError):
    """
    A hypothesis required by the requested computation does not hold.

    The message names the hypothesis, e.g. ``"Assumption (A) required for derbound"``.
    """

    exit_code = 2


class GeometryError(DegenHeatError):
    """A mask or set the computation relies on is empty at grid resolution."""

    exit_code = 4


class SolverConvergenceError(DegenHeatError):
    """
    Conjugate gradients stopped at ``maxiter`` without reaching the tolerance.

    Attributes
    ----------
    best_iterate : np.ndarray
        Iterate with the smallest relative residual seen.
    residual : float
        Relative residual of ``best_iterate``.
    iterations : int
        Iterations performed.
    step : int or None
        Time step index when raised from a time-stepping loop.
    """

    exit_code = 3

    def __init__(
        self,
        message: str,
        best_iterate: np.ndarray,
        residual: float,
        iterations: int,
        step: Optional[int] = None,
    ):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual = residual
        self.iterations = iterations
        self.step = step

    def at_step(self, step: int) -> "SolverConvergenceError":
        """Return a copy of this error tagged with the failing time step."""
        return SolverConvergenceError(
            f"time step {step}: {self}",
            self.best_iterate,
            self.residual,
            self.iterations,
            step=step,
        )


def exit_code_for(error: BaseException) -> int:
    """Exit code for ``error``; unknown errors map to 1."""
    return getattr(error, "exit_code", 1) if isinstance(error, DegenHeatError) else 1

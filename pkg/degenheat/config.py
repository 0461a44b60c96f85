"""
Experiment configuration.

An experiment is one JSON document validated by :class:`ExperimentConfig`.
Loading turns it into domain objects and re-checks every hypothesis the
chosen mode relies on, so a run never starts on data its checks would
reject.
"""

import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .diagnostics import DEFAULT_DECAY_SLACK, DEFAULT_TOL_DISC
from .exceptions import ConfigurationError, ContractError
from .grid import Grid, TimeGrid, build_grid, build_time_grid
from .linalg import DEFAULT_TOL
from .parabolic import ProblemSpec
from .potential import POTENTIAL_FAMILIES, PotentialSpec
from .sources import SOURCE_KINDS, SourceSpec
from .stationary import StationarySpec

logger = logging.getLogger(__name__)

MODES = ("solve", "limit", "stationary", "sweep", "decay", "check")
BOUND_NAMES = ("bound2", "derbound", "energyInf", "penalization_mass")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class GridConfig(_Strict):
    extents: List[float] = Field(..., description="Side lengths L_j of the box.")
    counts: List[int] = Field(..., description="Interior node counts n_j per axis.")


class TimeConfig(_Strict):
    horizon: float = Field(..., description="Final time T.")
    steps: int = Field(..., description="Number of time steps m.")


class PotentialConfig(_Strict):
    family: str
    center: List[float] = [0.5]
    radius: float = 0.0
    growth: float = 0.0
    amplitude: float = 1.0
    samples: Optional[List[List[float]]] = Field(
        None, description="grid_sampled only: (m + 1) rows of node values on the experiment grid."
    )
    monotone: bool = Field(False, description="grid_sampled only: a is non-increasing in time.")

    @model_validator(mode="after")
    def _known_family(self):
        if self.family not in POTENTIAL_FAMILIES:
            raise ValueError(f"Unknown potential family '{self.family}', expected one of {POTENTIAL_FAMILIES}")
        if (self.family == "grid_sampled") != (self.samples is not None):
            raise ValueError("samples are required for grid_sampled and rejected for other families")
        return self


class SourceConfig(_Strict):
    kind: str = "zero"
    modes: List[int] = [1]
    center: List[float] = [0.5]
    width: float = 0.1
    amplitude: float = 1.0
    normalize: bool = False
    restrict_to_zero_set: bool = False

    @model_validator(mode="after")
    def _known_kind(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"Unknown source kind '{self.kind}', expected one of {SOURCE_KINDS}")
        return self

    def to_spec(self) -> SourceSpec:
        return SourceSpec(
            kind=self.kind,
            modes=tuple(self.modes),
            center=tuple(self.center),
            width=self.width,
            amplitude=self.amplitude,
            normalize=self.normalize,
            restrict_to_zero_set=self.restrict_to_zero_set,
        )


class ToleranceConfig(_Strict):
    cg: float = DEFAULT_TOL
    disc: float = DEFAULT_TOL_DISC
    decay_slack: float = DEFAULT_DECAY_SLACK


class ExperimentConfig(_Strict):
    """
    Schema of an experiment file.

    ``lambda`` and ``lambdas`` are the JSON names of ``penalty`` and
    ``penalties``. ``time`` is required by every mode except ``stationary``,
    where ``stationary_time`` selects the slice ``a(., t)`` instead.
    """

    mode: Literal["solve", "limit", "stationary", "sweep", "decay", "check"]
    grid: GridConfig
    time: Optional[TimeConfig] = None
    potential: PotentialConfig
    forcing: SourceConfig = SourceConfig()
    initial: SourceConfig = SourceConfig()
    penalty: Optional[float] = Field(None, alias="lambda")
    penalties: Optional[List[float]] = Field(None, alias="lambdas")
    epsilon: Optional[float] = None
    bounds: Optional[List[str]] = None
    stationary_time: float = 0.0
    output: str = "degenheat"
    tolerances: ToleranceConfig = ToleranceConfig()

    @model_validator(mode="after")
    def _mode_requirements(self):
        if self.mode != "stationary" and self.time is None:
            raise ValueError(f"mode '{self.mode}' needs a 'time' section")
        if self.mode in ("solve", "check", "stationary") and self.penalty is None:
            raise ValueError(f"mode '{self.mode}' needs 'lambda'")
        if self.mode in ("sweep", "decay") and not self.penalties:
            raise ValueError(f"mode '{self.mode}' needs 'lambdas'")
        if self.mode == "decay" and self.epsilon is None:
            raise ValueError("mode 'decay' needs 'epsilon'")
        if self.bounds is not None:
            unknown = sorted(set(self.bounds) - set(BOUND_NAMES))
            if unknown:
                raise ValueError(f"Unknown bounds {unknown}, expected a subset of {BOUND_NAMES}")
        return self

    # -- domain objects ----------------------------------------------

    def build_grid(self) -> Grid:
        return build_grid(self.grid.extents, self.grid.counts)

    def build_time_grid(self) -> TimeGrid:
        if self.time is None:
            raise ConfigurationError(f"mode '{self.mode}' has no time grid")
        return build_time_grid(self.time.horizon, self.time.steps)

    def build_potential(self) -> PotentialSpec:
        p = self.potential
        if p.family == "grid_sampled":
            return PotentialSpec.from_samples(
                np.asarray(p.samples, dtype=np.float64),
                self.build_grid(),
                self.build_time_grid(),
                monotone=p.monotone,
            )
        return PotentialSpec(
            p.family, center=tuple(p.center), radius=p.radius, growth=p.growth, amplitude=p.amplitude
        )

    def build_problem(self, penalty: Optional[float] = None) -> ProblemSpec:
        if penalty is None:
            penalty = self.penalty or 0.0
        return ProblemSpec(
            grid=self.build_grid(),
            time_grid=self.build_time_grid(),
            potential=self.build_potential(),
            forcing=self.forcing.to_spec(),
            initial=self.initial.to_spec(),
            penalty=penalty,
            cg_tol=self.tolerances.cg,
        )

    def build_stationary(self, penalty: Optional[float] = None) -> StationarySpec:
        if penalty is None:
            penalty = self.penalty or 0.0
        horizon = np.inf if self.time is None else self.time.horizon
        return StationarySpec.from_specs(
            self.build_grid(),
            self.build_potential(),
            self.forcing.to_spec(),
            penalty,
            t=self.stationary_time,
            horizon=horizon,
            cg_tol=self.tolerances.cg,
        )

    def validate_hypotheses(self) -> None:
        """
        Re-check the hypotheses the mode relies on.

        Raises
        ------
        ConfigurationError
            If a domain object rejects its parameters.
        ContractError
            Naming the violated hypothesis.
        """
        if self.mode == "stationary":
            self.build_stationary()
            return
        problem = self.build_problem()
        if self.mode == "limit":
            problem.check_hypotheses("limit")
        elif self.mode == "sweep":
            problem.check_hypotheses("strong_convergence")
            problem.check_hypotheses("limit")
        elif self.mode == "decay":
            problem.check_hypotheses("exponential_decay")
        elif self.mode == "check" and self.bounds is not None:
            if "derbound" in self.bounds and not problem.potential.monotone_flag:
                raise ContractError("Assumption (A) required for derbound")
            if "energyInf" in self.bounds:
                problem.check_hypotheses("limit")


def parse_config(document: Union[str, dict]) -> ExperimentConfig:
    """
    Validate a JSON string or an already decoded mapping.

    Raises
    ------
    ConfigurationError
        On malformed JSON, unknown keys or invalid values.
    ContractError
        If the data violate a hypothesis of the chosen mode.
    """
    try:
        if isinstance(document, str):
            config = ExperimentConfig.model_validate_json(document)
        else:
            config = ExperimentConfig.model_validate(document)
    except ValidationError as err:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in e['loc']) or 'config'}: {e['msg']}" for e in err.errors()
        )
        raise ConfigurationError(f"Invalid experiment config: {problems}") from None
    config.validate_hypotheses()
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate an experiment file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"Config file not found: {path}") from None
    except OSError as err:
        raise ConfigurationError(f"Cannot read config file {path}: {err}") from None
    try:
        json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"Config file {path} is not valid JSON: {err}") from None
    logger.info(f"Loaded experiment config from {path}")
    return parse_config(text)

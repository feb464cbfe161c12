"""Scenario configuration: the YAML document driving the command-line runs."""

from enum import Enum
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import BALANCE_TOLERANCE, DEFAULT_MAX_WORKERS, DEFAULT_REFERENCE_UNIT
from ..errors import ConfigError
from .bath import BathSpec


class RunMode(str, Enum):
    """Pipeline selected by a scenario."""

    STEADY = "steady"
    VERIFY = "verify"
    SWEEP = "sweep"
    OCCUPATION_SCAN = "occupation-scan"
    FIG1 = "fig1"


class PresetName(str, Enum):
    """Built-in example systems."""

    ELECTRONIC = "electronic"
    OSCILLATOR = "oscillator"
    SPIN_BOSON = "spin-boson"
    MIXED_SPIN = "mixed-spin"


class PresetParams(BaseModel):
    """Parameters of the built-in systems, accepted under their physics names."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    levels: int = Field(1, alias="N", ge=1)
    epsilon: float = Field(1.0, alias="eps")
    interaction: float = Field(0.0, alias="U")
    hopping: float = Field(0.0, alias="T")
    omega: float = Field(1.0, alias="Omega", gt=0)
    n_cut: int = Field(1, alias="N_cut", ge=1)


class ModelSpec(BaseModel):
    """Either a preset with parameters or a set of operator files."""

    preset: PresetName | None = None
    params: PresetParams = Field(default_factory=PresetParams)
    hamiltonian: Path | None = None
    number_op: Path | None = None
    couplings: list[Path] = Field(default_factory=list)

    @model_validator(mode="after")
    def _validate_source(self) -> "ModelSpec":
        from_files = self.hamiltonian is not None or self.number_op is not None
        if self.preset is None and not from_files:
            raise ValueError("model needs either a preset or operator files")
        if self.preset is not None and from_files:
            raise ValueError("model cannot combine a preset with operator files")
        if from_files and (self.hamiltonian is None or self.number_op is None):
            raise ValueError("operator models need both hamiltonian and number_op")
        return self

    @classmethod
    def from_string(cls, text: str) -> "ModelSpec":
        """Parse ``name:key=value,...`` as used by ``--model``."""
        name, _, rest = text.partition(":")
        params: dict[str, str] = {}
        for item in filter(None, (part.strip() for part in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"Model parameter {item!r} is not key=value")
            params[key.strip()] = value.strip()
        try:
            return cls(preset=PresetName(name.strip()), params=PresetParams(**params))
        except ValueError as e:
            raise ConfigError(f"Invalid model {text!r}: {e}") from e


class SolverOptions(BaseModel):
    """Stationary-state solver selection and numerical knobs."""

    method: Literal["auto", "ladder", "nullspace", "evolution"] = "auto"
    degeneracy_tol: float | None = Field(None, gt=0)
    tolerance: float = Field(BALANCE_TOLERANCE, gt=0)
    t_final: float | None = Field(None, gt=0)
    dt: float | None = Field(None, gt=0)
    max_workers: int = Field(DEFAULT_MAX_WORKERS, ge=1)


class GridSpec(BaseModel):
    """Evenly spaced (or log-spaced) grid of values."""

    start: float
    stop: float
    points: int = Field(..., ge=0)
    log: bool = False

    @model_validator(mode="after")
    def _validate_log(self) -> "GridSpec":
        if self.log and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log grids need positive bounds")
        return self

    def values(self) -> np.ndarray:
        """Grid points in ascending order of construction."""
        if self.log:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


class SweepSpec(BaseModel):
    """A dotted parameter path (e.g. ``baths.1.beta``) scanned over a grid."""

    path: str
    grid: GridSpec


class OutputSpec(BaseModel):
    """Where result files go."""

    directory: Path = Path("out")
    prefix: str = ""

    def path(self, name: str) -> Path:
        """Location of one output file."""
        return self.directory / f"{self.prefix}{name}"


class ScenarioConfig(BaseModel):
    """One complete run: system, reservoirs, pipeline and outputs."""

    reference_unit: str = DEFAULT_REFERENCE_UNIT
    run: RunMode = RunMode.STEADY
    model: ModelSpec | None = None
    baths: list[BathSpec] = Field(default_factory=list)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    grid: GridSpec | None = None
    sweep: SweepSpec | None = None
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def _validate_run(self) -> "ScenarioConfig":
        if self.run in (RunMode.STEADY, RunMode.VERIFY, RunMode.SWEEP):
            if self.model is None:
                raise ValueError(f"run '{self.run.value}' needs a model")
            if not self.baths:
                raise ValueError(f"run '{self.run.value}' needs at least one bath")
        if self.run is RunMode.SWEEP and self.sweep is None:
            raise ValueError("run 'sweep' needs a sweep section")
        scan = self.run is RunMode.OCCUPATION_SCAN
        if scan and (not self.baths or self.grid is None):
            raise ValueError("run 'occupation-scan' needs baths and a grid")
        return self

    @classmethod
    def from_yaml(cls, path: Path) -> "ScenarioConfig":
        """Load and validate a YAML scenario file."""
        return cls.from_mapping(read_scenario_mapping(path))

    @classmethod
    def from_mapping(cls, data: Any) -> "ScenarioConfig":
        """Validate an already parsed mapping, normalizing errors to ConfigError."""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid scenario: {e}") from e

    def with_value(self, path: str, value: float) -> "ScenarioConfig":
        """Return a copy with the scalar at dotted ``path`` replaced.

        Raises ConfigError when the path does not address an existing scalar;
        ``pydantic.ValidationError`` propagates when the new value is invalid.
        """
        data = self.model_dump(by_alias=True)
        keys = path.split(".")
        node: Any = data
        for key in keys[:-1]:
            node = _step(node, key, path)
        last = keys[-1]
        current = _step(node, last, path)
        if isinstance(current, (dict, list)) or (
            current is not None and not isinstance(current, (int, float))
        ):
            raise ConfigError(f"Sweep path {path!r} does not address a number")
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
        return type(self).model_validate(data)


def _step(node: Any, key: str, path: str) -> Any:
    if isinstance(node, dict) and key in node:
        return node[key]
    if isinstance(node, list) and key.isdigit() and int(key) < len(node):
        return node[int(key)]
    raise ConfigError(f"Sweep path {path!r} is invalid at {key!r}")


def read_scenario_mapping(path: Path) -> dict[str, Any]:
    """Parse a YAML scenario file into a plain mapping without validating it."""
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot read scenario {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Scenario {path} must be a mapping at the top level")
    return data

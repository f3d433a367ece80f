"""
Experiment configuration: schema, TOML loading and the defaults dump.

A config file is TOML with one table per model, for example::

    trials = 20

    [scenario.sensor]
    clutter_rate = 30.0

    [truncation.sampler]
    iterations = 1000

    [sweep]
    parameter = "P_D"
    values = [0.78, 0.86, 0.96]

Missing keys take the defaults below, which are the standard benchmark
settings. Any validation failure is reported as a single
:class:`ConfigValidationError` naming every offending dotted key.
"""

import json
import math
import tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.exceptions import ConfigValidationError
from app.schemas.filter import TruncationBudget
from app.schemas.sampler import SamplerVariant
from app.schemas.scenario import ScenarioParams


class SweepParameter(str, Enum):
    ITERATIONS = "T"
    TRAJECTORIES = "N_X"
    DETECTION = "P_D"
    CLUTTER = "lambda_c"
    ALPHA = "alpha"
    BETA = "beta"


SWEEP_BOUNDS: Dict[SweepParameter, Tuple[float, float]] = {
    SweepParameter.ITERATIONS: (1000, 10000),
    SweepParameter.TRAJECTORIES: (10, 100),
    SweepParameter.DETECTION: (0.78, 0.96),
    SweepParameter.CLUTTER: (50, 140),
    SweepParameter.ALPHA: (0.1, 0.9),
    SweepParameter.BETA: (0.1, 0.9),
}

# (section, path inside the section) that each sweep parameter overrides
SWEEP_TARGETS: Dict[SweepParameter, Tuple[str, Tuple[str, ...]]] = {
    SweepParameter.ITERATIONS: ("truncation", ("sampler", "iterations")),
    SweepParameter.TRAJECTORIES: ("scenario", ("expected_trajectories",)),
    SweepParameter.DETECTION: ("scenario", ("sensor", "pd")),
    SweepParameter.CLUTTER: ("scenario", ("sensor", "clutter_rate")),
    SweepParameter.ALPHA: ("truncation", ("sampler", "alpha")),
    SweepParameter.BETA: ("truncation", ("sampler", "beta")),
}

DEFAULT_VARIANTS = [
    SamplerVariant.TGS_PLUS,
    SamplerVariant.RGS_PLUS,
    SamplerVariant.DGS_PLUS_FWD,
    SamplerVariant.DGS_PLUS_BWD,
    SamplerVariant.SGS_PLUS,
]


class SweepGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parameter: SweepParameter = Field(..., description="Parameter varied across grid points")
    values: List[float] = Field(..., min_length=1, description="Grid values, in run order")
    enforce_bounds: bool = Field(True, description="Reject values outside the standard parameter ranges")

    @model_validator(mode="after")
    def check_bounds(self) -> "SweepGrid":
        if self.enforce_bounds:
            low, high = SWEEP_BOUNDS[self.parameter]
            outside = [v for v in self.values if not low <= v <= high]
            if outside:
                raise ValueError(f"{self.parameter.value} values {outside} outside [{low}, {high}]")
        if self.parameter is SweepParameter.ITERATIONS and any(v != int(v) for v in self.values):
            raise ValueError("iteration counts must be whole numbers")
        return self


class MetricParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cutoff: float = Field(100.0, gt=0.0, description="OSPA / OSPA2 cut-off c (m)")
    order: float = Field(1.0, ge=1.0, description="OSPA / OSPA2 order p")
    ospa2_window: Optional[int] = Field(
        None, ge=1, description="Sliding window length in scans; unset uses the whole scenario"
    )


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioParams = Field(default_factory=ScenarioParams)
    truncation: TruncationBudget = Field(default_factory=TruncationBudget)
    sweep: Optional[SweepGrid] = None
    variants: List[SamplerVariant] = Field(default_factory=lambda: list(DEFAULT_VARIANTS), min_length=1)
    trials: int = Field(100, ge=1, description="Monte Carlo trials per grid point")
    output_dir: Path = Field(Path("results"), description="Directory receiving every report file")
    seed: int = Field(0, ge=0, lt=2**64, description="Root seed of every scenario and chain")
    metrics: MetricParams = Field(default_factory=MetricParams)

    def grid(self) -> List[Optional[float]]:
        """Sweep values, or a single ``None`` point when nothing is swept."""
        return list(self.sweep.values) if self.sweep else [None]

    def at_grid_value(self, value: Optional[float]) -> Tuple[ScenarioParams, TruncationBudget]:
        """Scenario and truncation settings with the swept parameter set to ``value``."""
        if value is None or self.sweep is None:
            return self.scenario, self.truncation
        section, path = SWEEP_TARGETS[self.sweep.parameter]
        data = {"scenario": self.scenario.model_dump(), "truncation": self.truncation.model_dump()}
        node = data[section]
        for key in path[:-1]:
            node = node[key]
        node[path[-1]] = int(value) if self.sweep.parameter is SweepParameter.ITERATIONS else value
        try:
            return (
                ScenarioParams.model_validate(data["scenario"]),
                TruncationBudget.model_validate(data["truncation"]),
            )
        except ValidationError as exc:
            raise config_error(exc, prefix=section) from exc


def config_error(exc: ValidationError, prefix: str = "") -> ConfigValidationError:
    keys, details = [], []
    for err in exc.errors():
        parts = [prefix] if prefix else []
        parts += [str(p) for p in err["loc"]]
        key = ".".join(parts) or "<root>"
        if key not in keys:
            keys.append(key)
        details.append(f"{key}: {err['msg']}")
    return ConfigValidationError(keys, details)


def parse_experiment_config(data: Mapping[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(dict(data))
    except ValidationError as exc:
        raise config_error(exc) from exc


def loads_experiment_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigValidationError(["<toml>"], [str(exc)]) from exc
    return parse_experiment_config(data)


def load_experiment_config(path: Union[str, Path, None]) -> ExperimentConfig:
    """Config from a TOML file, or the defaults when ``path`` is ``None``."""
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigValidationError(["<file>"], [f"cannot read {path}: {exc}"]) from exc
    return loads_experiment_config(text)


def _toml_value(value: Any) -> str:
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return json.dumps(str(value))


def _flatten(data: Mapping[str, Any], prefix: str = "") -> List[Tuple[str, Any]]:
    items: List[Tuple[str, Any]] = []
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            items.extend(_flatten(value, dotted + "."))
        elif value is not None:
            items.append((dotted, value))
    return items


def dump_experiment_config(cfg: Optional[ExperimentConfig] = None) -> str:
    """Dotted ``key = value`` lines (valid TOML); unset optional keys are omitted."""
    cfg = ExperimentConfig() if cfg is None else cfg
    lines = [f"{key} = {_toml_value(value)}" for key, value in _flatten(cfg.model_dump())]
    return "\n".join(lines) + "\n"

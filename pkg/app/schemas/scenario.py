from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class RegionParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_min: float = Field(0.0, description="Left edge (m)")
    x_max: float = Field(3000.0, description="Right edge (m)")
    y_min: float = Field(0.0, description="Bottom edge (m)")
    y_max: float = Field(3000.0, description="Top edge (m)")

    @model_validator(mode="after")
    def check_extent(self) -> "RegionParams":
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("region must have positive width and height")
        return self


class MotionParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dt: float = Field(1.0, gt=0.0, description="Sampling period (s)")
    sigma_p: float = Field(5.0, ge=0.0, description="Process noise std per axis (m s^-2)")
    ps: float = Field(0.99, ge=0.0, le=1.0, description="Survival probability")


class SensorParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sigma_m: float = Field(10.0, gt=0.0, description="Measurement noise std per axis (m)")
    pd: float = Field(0.86, ge=0.0, le=1.0, description="Detection probability")
    clutter_rate: float = Field(90.0, ge=0.0, description="Mean clutter returns per scan")


class BirthParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nx: int = Field(10, ge=1, description="Birth grid columns")
    ny: int = Field(5, ge=1, description="Birth grid rows")
    std: float = Field(10.0, gt=0.0, description="Birth density std on every state component")
    pb: Optional[float] = Field(
        None, ge=0.0, lt=1.0, description="Per-component birth probability; derived from N_X when unset"
    )

    @property
    def n_components(self) -> int:
        return self.nx * self.ny


class ScenarioParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    region: RegionParams = Field(default_factory=RegionParams)
    duration: int = Field(100, ge=1, description="Number of scans")
    motion: MotionParams = Field(default_factory=MotionParams)
    sensor: SensorParams = Field(default_factory=SensorParams)
    birth: BirthParams = Field(default_factory=BirthParams)
    expected_trajectories: float = Field(50.0, ge=0.0, description="Expected total trajectories N_X")
    seed: int = Field(0, ge=0, lt=2**64)

    @property
    def birth_probability(self) -> float:
        """P_B, either explicit or N_X / (duration * N_B) so that N_B * P_B * duration = N_X."""
        if self.birth.pb is not None:
            return self.birth.pb
        return self.expected_trajectories / (self.duration * self.birth.n_components)

    @model_validator(mode="after")
    def check_birth_probability(self) -> "ScenarioParams":
        if self.birth.pb is None and self.birth_probability >= 1.0:
            raise ValueError("expected_trajectories too large for duration and birth grid (P_B >= 1)")
        return self

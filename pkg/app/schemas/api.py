from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.sampler import SamplerConfig, SamplerVariant


class SampleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cost_matrix: List[List[float]] = Field(
        ..., min_length=1, description="P rows of M+2 positive entries ordered j = -1, 0, 1..M"
    )
    sampler: SamplerConfig = Field(default_factory=lambda: SamplerConfig(iterations=1000))
    initial: Optional[List[int]] = Field(None, description="Initial map; all-zeros when omitted")
    max_results: int = Field(100, ge=1, le=10_000, description="Unique maps returned, by descending weight")


class AssignmentOut(BaseModel):
    map: List[int]
    log_weight: float


class WeightSummary(BaseModel):
    effective_sample_size: float = Field(..., description="1 / sum of squared normalized weights")
    max_normalized_weight: float
    variance: float = Field(..., description="Variance of the weights rescaled to mean one")


class SampleResponse(BaseModel):
    variant: SamplerVariant
    iterations: int
    n_unique: int
    assignments: List[AssignmentOut]
    importance_weights: Optional[WeightSummary] = None


class OracleCheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cost_matrix: List[List[float]] = Field(..., min_length=1)
    sampler: SamplerConfig = Field(default_factory=lambda: SamplerConfig(iterations=20_000))


class OracleCheckResponse(BaseModel):
    variant: SamplerVariant
    iterations: int
    n_valid_maps: int
    total_variation: float


class TrackOut(BaseModel):
    label: List[int] = Field(..., description="[birth scan, birth component index]")
    start_scan: int
    states: List[List[float]] = Field(..., description="Per scan [x, vx, y, vy]")


class FrameOut(BaseModel):
    scan: int
    points: List[List[float]]


class SimulateResponse(BaseModel):
    duration: int
    tracks: List[TrackOut]
    frames: List[FrameOut]

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.sampler import SamplerConfig


class Allocation(str, Enum):
    FIXED = "fixed"
    PROPORTIONAL = "proportional"


class TruncationBudget(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    max_hypotheses: int = Field(1000, ge=1, description="H_max, cap applied after the weight threshold")
    min_log_weight: float = Field(
        math.log(1e-5), le=0.0, description="Children below max log-weight plus this offset are dropped"
    )
    allocation: Allocation = Field(
        Allocation.FIXED, description="fixed: T per parent; proportional: T * sqrt(w_h) / sum(sqrt(w))"
    )
    exhaustive: bool = Field(False, description="Enumerate every valid map instead of sampling")
    parent_workers: int = Field(1, ge=1, description="Threads running the per-parent sampler chains of a scan")

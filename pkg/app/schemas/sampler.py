from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings


class SamplerVariant(str, Enum):
    TGS_PLUS = "TGS+"
    RGS_PLUS = "RGS+"
    DGS_PLUS_FWD = "DGS+fwd"
    DGS_PLUS_BWD = "DGS+bwd"
    SGS_PLUS = "SGS+"
    RGS_GENERIC = "RGS-generic"
    SGS_GENERIC = "SGS-generic"

    @property
    def is_sweep(self) -> bool:
        """True for variants that emit one iterate per full coordinate sweep."""
        return self in (SamplerVariant.SGS_PLUS, SamplerVariant.SGS_GENERIC)

    @property
    def is_weighted(self) -> bool:
        return self is SamplerVariant.TGS_PLUS


class SamplerConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: SamplerVariant = Field(SamplerVariant.TGS_PLUS, description="Sampler variant")
    iterations: int = Field(
        settings.DEFAULT_ITERATIONS, ge=1, description="Emitted iterates T (sweeps for SGS variants)"
    )
    alpha: float = Field(settings.DEFAULT_ALPHA, gt=0.0, le=1.0, description="Mixture weight of the exact conditional")
    beta: float = Field(settings.DEFAULT_BETA, gt=0.0, le=1.0, description="Tempering exponent")
    seed: int = Field(0, ge=0, lt=2**64, description="64-bit chain seed")

from fastapi import APIRouter
import logging

import numpy as np

from app.core.config import settings
from app.core.decorators import log_action
from app.core.exceptions import CapacityError, DomainError
from app.schemas.api import (
    AssignmentOut,
    OracleCheckRequest,
    OracleCheckResponse,
    SampleRequest,
    SampleResponse,
    WeightSummary,
)
from app.schemas.sampler import SamplerConfig
from app.services.assignment.core import CostMatrix, brute_force_distribution, total_variation
from app.services.gibbs.diagnostics import (
    importance_weight_variance,
    normalized_importance_weights,
    weighted_distribution,
)
from app.services.gibbs.samplers import dedup, run_sampler

logger = logging.getLogger(__name__)
router = APIRouter()


def _check_budget(cfg: SamplerConfig, eta: CostMatrix) -> None:
    work = cfg.iterations * (eta.P if cfg.variant.is_sweep else 1)
    if work > settings.API_MAX_ITERATIONS:
        raise CapacityError(
            f"{work} coordinate updates requested, limit is {settings.API_MAX_ITERATIONS} per request"
        )


@router.post("/sample", response_model=SampleResponse)
@log_action(action_type="api_endpoint", action_name="sample")
def sample(body: SampleRequest):
    """
    Run one sampler chain and return its unique maps.

    Maps come back by descending joint log weight, capped at ``max_results``.
    TGS+ responses also summarize the normalized importance weights.
    """
    eta = CostMatrix.from_rows(body.cost_matrix)
    _check_budget(body.sampler, eta)
    batch = run_sampler(body.initial, eta, body.sampler)
    unique = sorted(dedup(batch), key=lambda u: -u.log_weight)

    summary = None
    if batch.importance_log_weights is not None:
        w = normalized_importance_weights(batch)
        summary = WeightSummary(
            effective_sample_size=float(1.0 / np.sum(w ** 2)),
            max_normalized_weight=float(w.max()),
            variance=importance_weight_variance(batch),
        )
    logger.info(f"{body.sampler.variant.value}: {len(unique)} unique maps from {len(batch)} iterates")
    return SampleResponse(
        variant=body.sampler.variant,
        iterations=len(batch),
        n_unique=len(unique),
        assignments=[AssignmentOut(map=list(u.map), log_weight=u.log_weight) for u in unique[: body.max_results]],
        importance_weights=summary,
    )


@router.post("/oracle-check", response_model=OracleCheckResponse)
@log_action(action_type="api_endpoint", action_name="oracle_check")
def oracle_check(body: OracleCheckRequest):
    """Total variation between the chain's empirical law and the enumerated target."""
    eta = CostMatrix.from_rows(body.cost_matrix)
    limit = settings.API_MAX_ENUMERATION
    if (eta.M + 2) ** eta.P > limit:
        raise DomainError(f"oracle check needs (M+2)^P <= {limit}, got {eta.M + 2}^{eta.P}")
    _check_budget(body.sampler, eta)
    exact = brute_force_distribution(eta, limit)
    batch = run_sampler(None, eta, body.sampler)
    return OracleCheckResponse(
        variant=body.sampler.variant,
        iterations=len(batch),
        n_valid_maps=len(exact),
        total_variation=total_variation(weighted_distribution(batch), exact),
    )

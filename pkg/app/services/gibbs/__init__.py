from app.services.gibbs.diagnostics import (
    empirical_distribution,
    importance_weight_bound,
    iterate_log_weights,
    normalized_importance_weights,
    oracle_distance,
    thin,
    unique_sample_count,
    weighted_distribution,
)
from app.services.gibbs.samplers import (
    SampleBatch,
    dedup,
    dgs_plus_run,
    rgs_plus_run,
    rgs_run,
    run_sampler,
    sgs_plus_run,
    sgs_run,
    tgs_plus_run,
)
from app.services.gibbs.state import ConditionalState, init_state, propagate_state, proposal, zeros_map

__all__ = [
    "ConditionalState",
    "SampleBatch",
    "dedup",
    "dgs_plus_run",
    "empirical_distribution",
    "importance_weight_bound",
    "init_state",
    "iterate_log_weights",
    "normalized_importance_weights",
    "oracle_distance",
    "propagate_state",
    "proposal",
    "rgs_plus_run",
    "rgs_run",
    "run_sampler",
    "sgs_plus_run",
    "sgs_run",
    "tgs_plus_run",
    "thin",
    "unique_sample_count",
    "weighted_distribution",
    "zeros_map",
]

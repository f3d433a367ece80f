from app.services.filter.glmb import (
    GlmbDensity,
    GlmbHypothesis,
    build_cost_matrix,
    cardinality_distribution,
    extract_estimate,
    joint_predict_update,
)
from app.services.filter.tracker import GlmbTracker, TrackingResult, run_filter

__all__ = [
    "GlmbDensity",
    "GlmbHypothesis",
    "GlmbTracker",
    "TrackingResult",
    "build_cost_matrix",
    "cardinality_distribution",
    "extract_estimate",
    "joint_predict_update",
    "run_filter",
]

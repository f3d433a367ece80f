from app.services.assignment.core import (
    LOG_ZERO,
    AssociationMap,
    CostMatrix,
    WeightedAssignment,
    brute_force_distribution,
    conditional_direct,
    enumerate_valid_maps,
    is_positive_one_to_one,
    joint_log_weight,
    random_cost_matrix,
    total_variation,
)
from app.services.assignment.io import format_cost_matrix, parse_cost_matrix

__all__ = [
    "LOG_ZERO",
    "AssociationMap",
    "CostMatrix",
    "WeightedAssignment",
    "brute_force_distribution",
    "conditional_direct",
    "enumerate_valid_maps",
    "is_positive_one_to_one",
    "joint_log_weight",
    "random_cost_matrix",
    "total_variation",
    "format_cost_matrix",
    "parse_cost_matrix",
]

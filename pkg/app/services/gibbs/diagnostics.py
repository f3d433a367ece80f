"""
Estimators and checks over sampler output.

Importance weights stay in the log domain until a weighted estimate is
requested; normalization goes through ``scipy.special.logsumexp``.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Dict, Optional

import numpy as np
from scipy.special import logsumexp

from app.core.exceptions import DomainError
from app.services.assignment.core import (
    AssociationMap,
    CostMatrix,
    brute_force_distribution,
    masked_row,
    total_variation,
    valid_maps_array,
)
from app.services.gibbs.samplers import SampleBatch


def normalized_importance_weights(batch: SampleBatch) -> np.ndarray:
    """Weights summing to one; uniform for unweighted variants."""
    T = len(batch)
    if batch.importance_log_weights is None:
        return np.full(T, 1.0 / T)
    log_w = batch.importance_log_weights
    return np.exp(log_w - logsumexp(log_w))


def weighted_distribution(batch: SampleBatch, weights: Optional[np.ndarray] = None) -> Dict[AssociationMap, float]:
    """Empirical distribution over maps, importance-weighted when the batch carries weights."""
    if len(batch) == 0:
        return {}
    w = normalized_importance_weights(batch) if weights is None else np.asarray(weights, dtype=float)
    unique, inverse = np.unique(batch.iterates, axis=0, return_inverse=True)
    mass = np.bincount(np.asarray(inverse).reshape(-1), weights=w, minlength=unique.shape[0])
    mass = mass / mass.sum()
    return {tuple(int(v) for v in row): float(p) for row, p in zip(unique, mass)}


def empirical_distribution(batch: SampleBatch) -> Dict[AssociationMap, float]:
    """Unweighted visit frequencies."""
    return weighted_distribution(batch, np.ones(len(batch)))


def thin(batch: SampleBatch, every: int, offset: Optional[int] = None) -> SampleBatch:
    """
    Keep every ``every``-th iterate.

    By default the kept iterates are ``every-1, 2*every-1, ...`` (0-based), so
    thinning a forward periodic scan by ``P`` keeps the end of each sweep.
    """
    if every < 1:
        raise DomainError(f"thinning step must be >= 1, got {every}")
    start = every - 1 if offset is None else offset
    weights = batch.importance_log_weights
    return replace(
        batch,
        iterates=batch.iterates[start::every],
        importance_log_weights=None if weights is None else weights[start::every],
    )


def unique_sample_count(batch: SampleBatch) -> int:
    if len(batch) == 0:
        return 0
    return int(np.unique(batch.iterates, axis=0).shape[0])


def importance_weight_variance(batch: SampleBatch) -> float:
    """Variance of the importance weights rescaled to mean one."""
    w = normalized_importance_weights(batch) * len(batch)
    return float(np.var(w))


def importance_weight_bound(eta: CostMatrix, alpha: float, beta: float, limit: Optional[int] = None) -> float:
    """
    Exact ``max_{i, gamma} pi_i(gamma_i | rest) / phi_i(gamma_i | rest) - 1``.

    The maximum is taken over every coordinate and every valid map by
    enumeration, so ``eta`` has to pass the enumeration guard. It bounds the
    variance of the mean-one importance weights of the tempered sampler.
    """
    worst = 1.0
    for gamma in valid_maps_array(eta.P, eta.M, limit):
        for i in range(eta.P):
            row = masked_row(i, gamma, eta.values)
            tempered = row ** beta
            col = gamma[i] + 1
            pi = row[col] / row.sum()
            phi = alpha * pi + (1.0 - alpha) * tempered[col] / tempered.sum()
            worst = max(worst, pi / phi)
    return float(worst - 1.0)


def iterate_log_weights(batch: SampleBatch) -> np.ndarray:
    """Joint log weight of every iterate, in emission order."""
    log_eta = batch.cost_matrix.log_values
    return log_eta[np.arange(batch.cost_matrix.P)[None, :], batch.iterates + 1].sum(axis=1)


def oracle_distance(batch: SampleBatch, limit: Optional[int] = None) -> float:
    """Total variation between the batch's (weighted) empirical law and the enumerated target."""
    exact = brute_force_distribution(batch.cost_matrix, limit)
    return total_variation(weighted_distribution(batch), exact)

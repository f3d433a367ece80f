"""
GLMB joint prediction and update with sampler-driven truncation.

Every parent hypothesis ``(I, xi)`` contributes one cost matrix whose rows are
its surviving labels followed by this scan's birth labels. Each unique map
drawn from that matrix becomes a child hypothesis; its log weight is the
parent log weight plus the joint log weight of the map. Children that agree
on labels and per-label association histories are merged by log-sum-exp,
normalized, thresholded and capped.

Row entries, for a label with existence factor ``q`` (``P_S`` for survivors,
``P_B`` for births) and predicted density ``p``:

    j = -1 : 1 - q
    j =  0 : q * (1 - P_D)
    j >= 1 : q * P_D * N(z_j; H m, S) / kappa(z_j)

Entries are floored at ``settings.MIN_COST_ENTRY`` so far-away measurements
keep the matrix strictly positive.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from app.core.config import settings
from app.core.exceptions import DomainError
from app.schemas.filter import Allocation, TruncationBudget
from app.services.assignment.core import CostMatrix, valid_maps_array
from app.services.gibbs.samplers import dedup, run_sampler
from app.services.models.gaussian import (
    GaussianDensity,
    Label,
    ModelSet,
    kalman_predict,
    kalman_update,
    log_predictive_likelihoods,
)
from app.services.scenario.types import MeasurementFrame

logger = logging.getLogger(__name__)

History = Tuple[int, ...]
HypothesisKey = Tuple[Tuple[Label, ...], Tuple[History, ...]]


@dataclass(frozen=True)
class GlmbHypothesis:
    labels: Tuple[Label, ...]
    histories: Tuple[History, ...]
    log_weight: float
    densities: Dict[Label, GaussianDensity]

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("hypothesis labels must be distinct")
        if len(self.histories) != len(self.labels) or set(self.densities) != set(self.labels):
            raise DomainError("histories and densities must be keyed exactly by the labels")

    @property
    def key(self) -> HypothesisKey:
        return self.labels, self.histories

    @property
    def cardinality(self) -> int:
        return len(self.labels)


@dataclass
class GlmbDensity:
    hypotheses: List[GlmbHypothesis]
    scan: int

    @classmethod
    def empty(cls, scan: int = -1) -> "GlmbDensity":
        """Single hypothesis with no labels and weight one."""
        return cls([GlmbHypothesis((), (), 0.0, {})], scan)

    def log_weights(self) -> np.ndarray:
        return np.array([h.log_weight for h in self.hypotheses], dtype=float)

    def total_weight(self) -> float:
        return float(np.exp(logsumexp(self.log_weights()))) if self.hypotheses else 0.0


@dataclass(frozen=True)
class CostTable:
    """Cost matrix of one parent with its row bookkeeping."""

    eta: CostMatrix
    labels: Tuple[Label, ...]
    histories: Tuple[History, ...]
    predicted: Tuple[GaussianDensity, ...]
    n_survivors: int


@dataclass
class ScanCache:
    """Per-scan memo of predicted densities, likelihood rows and updates, shared by all parents."""

    predicted: Dict[Tuple[Label, History], GaussianDensity] = field(default_factory=dict)
    log_likelihoods: Dict[Tuple[Label, History], np.ndarray] = field(default_factory=dict)
    updated: Dict[Tuple[Label, History, int], GaussianDensity] = field(default_factory=dict)


@dataclass
class ScanDiagnostics:
    scan: int
    n_hypotheses: int = 0
    n_unique_samples: int = 0
    map_cardinality: int = 0
    cpu_seconds: float = 0.0
    wall_seconds: float = 0.0
    kernel_seconds: float = 0.0


@dataclass
class UpdateResult:
    density: GlmbDensity
    diagnostics: ScanDiagnostics


def _row(existence: float, pd: float, log_lik: np.ndarray) -> np.ndarray:
    floor = settings.MIN_COST_ENTRY
    with np.errstate(divide="ignore", over="ignore"):
        detected = np.exp(math.log(existence) + log_lik) if existence > 0.0 else np.zeros_like(log_lik)
    row = np.concatenate([[1.0 - existence, existence * (1.0 - pd)], detected])
    return np.maximum(row, floor)


def build_cost_matrix(
    h: GlmbHypothesis,
    Z: MeasurementFrame,
    models: ModelSet,
    cache: Optional[ScanCache] = None,
) -> CostTable:
    """Rows: surviving labels of ``h`` in order, then the births of scan ``Z.scan``."""
    cache = ScanCache() if cache is None else cache
    sensor = models.sensor
    M = len(Z)
    rows: List[np.ndarray] = []
    labels: List[Label] = []
    histories: List[History] = []
    predicted: List[GaussianDensity] = []

    def likelihoods(key, density):
        if M == 0:
            return np.empty(0)
        if key not in cache.log_likelihoods:
            cache.log_likelihoods[key] = log_predictive_likelihoods(density, Z.points, sensor)
        return cache.log_likelihoods[key]

    for label, history in zip(h.labels, h.histories):
        key = (label, history)
        if key not in cache.predicted:
            cache.predicted[key] = kalman_predict(h.densities[label], models.motion)
        p_pred = cache.predicted[key]
        rows.append(_row(models.motion.ps, sensor.pd, likelihoods(key, p_pred)))
        labels.append(label)
        histories.append(history)
        predicted.append(p_pred)

    for component in models.birth.at_scan(Z.scan):
        key = (component.label, ())
        cache.predicted.setdefault(key, component.density)
        rows.append(_row(component.pb, sensor.pd, likelihoods(key, component.density)))
        labels.append(component.label)
        histories.append(())
        predicted.append(component.density)

    eta = CostMatrix(np.array(rows).reshape(len(rows), M + 2)) if rows else None
    return CostTable(eta, tuple(labels), tuple(histories), tuple(predicted), len(h.labels))


def _parent_seed(seed: int, scan: int, parent: int) -> int:
    ss = np.random.SeedSequence([int(seed), int(scan) + 1, int(parent)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _iteration_budgets(log_weights: np.ndarray, budget: TruncationBudget) -> List[int]:
    T = budget.sampler.iterations
    if budget.allocation is Allocation.FIXED:
        return [T] * log_weights.size
    root = np.exp(0.5 * (log_weights - log_weights.max()))
    return [max(1, int(round(T * r / root.sum()))) for r in root]


def _child(
    table: CostTable,
    gamma: Sequence[int],
    Z: MeasurementFrame,
    models: ModelSet,
    cache: ScanCache,
) -> Tuple[Tuple[Label, ...], Tuple[History, ...], Dict[Label, GaussianDensity]]:
    entries = []
    for i, j in enumerate(gamma):
        if j < 0:
            continue
        label, history, p_pred = table.labels[i], table.histories[i], table.predicted[i]
        if j == 0:
            density = p_pred
        else:
            key = (label, history, int(j))
            if key not in cache.updated:
                cache.updated[key] = kalman_update(p_pred, Z.points[j - 1], models.sensor)
            density = cache.updated[key]
        entries.append((label, history + (int(j),), density))
    entries.sort(key=lambda e: e[0])
    labels = tuple(e[0] for e in entries)
    histories = tuple(e[1] for e in entries)
    return labels, histories, {e[0]: e[2] for e in entries}


def truncate(children: List[GlmbHypothesis], budget: TruncationBudget) -> List[GlmbHypothesis]:
    """Normalize, drop children below the relative threshold, cap to ``H_max`` and renormalize."""
    if not children:
        return []
    lw = np.array([c.log_weight for c in children])
    lw = lw - logsumexp(lw)
    keep = np.flatnonzero(lw >= lw.max() + budget.min_log_weight)
    keep = keep[np.argsort(-lw[keep], kind="stable")][: budget.max_hypotheses]
    kept = lw[keep]
    kept = kept - logsumexp(kept)
    return [
        GlmbHypothesis(children[i].labels, children[i].histories, float(w), children[i].densities)
        for i, w in zip(keep, kept)
    ]


def _parent_maps(
    table: CostTable, iterations: int, seed: int, budget: TruncationBudget
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Unique maps of one parent, their joint log weights and the sampler time spent."""
    if table.eta is None:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(1), 0.0
    if budget.exhaustive:
        maps = valid_maps_array(table.eta.P, table.eta.M)
        return maps, table.eta.log_values[np.arange(table.eta.P)[None, :], maps + 1].sum(axis=1), 0.0
    cfg = budget.sampler.model_copy(update={"iterations": iterations, "seed": seed})
    tick = time.perf_counter()
    uniques = dedup(run_sampler(None, table.eta, cfg))
    elapsed = time.perf_counter() - tick
    maps = np.array([u.map for u in uniques], dtype=np.int64)
    return maps, np.array([u.log_weight for u in uniques]), elapsed


def predict_update_scan(
    g: GlmbDensity,
    Z: MeasurementFrame,
    models: ModelSet,
    budget: TruncationBudget,
    seed: int = 0,
) -> UpdateResult:
    """
    One GLMB recursion step plus the diagnostics of the scan.

    Each parent's chain runs on its own seed; with ``budget.parent_workers > 1``
    the chains run on a thread pool. Results are collected in parent order, so
    the output does not depend on the worker count.
    """
    if not g.hypotheses:
        raise DomainError("GLMB density has no hypotheses")
    started_cpu, started_wall = time.process_time(), time.perf_counter()
    diag = ScanDiagnostics(scan=Z.scan)
    cache = ScanCache()
    merged: Dict[HypothesisKey, List] = {}
    budgets = _iteration_budgets(g.log_weights(), budget)

    # the cache is filled here, single-threaded; chains only read their own table
    tables = [build_cost_matrix(parent, Z, models, cache) for parent in g.hypotheses]
    seeds = [_parent_seed(seed, Z.scan, index) for index in range(len(tables))]
    chain = partial(_parent_maps, budget=budget)
    if budget.parent_workers > 1 and len(tables) > 1:
        with ThreadPoolExecutor(max_workers=budget.parent_workers) as pool:
            outcomes = list(pool.map(chain, tables, budgets, seeds))
    else:
        outcomes = list(map(chain, tables, budgets, seeds))

    for parent, table, (maps, log_w, elapsed) in zip(g.hypotheses, tables, outcomes):
        diag.kernel_seconds += elapsed
        diag.n_unique_samples += int(maps.shape[0])
        for gamma, w in zip(maps, log_w):
            labels, histories, densities = _child(table, gamma, Z, models, cache)
            key = (labels, histories)
            if key in merged:
                merged[key][0].append(parent.log_weight + float(w))
            else:
                merged[key] = [[parent.log_weight + float(w)], densities]

    children = [
        GlmbHypothesis(key[0], key[1], float(logsumexp(weights)), densities)
        for key, (weights, densities) in merged.items()
    ]
    result = GlmbDensity(truncate(children, budget), Z.scan)
    diag.n_hypotheses = len(result.hypotheses)
    diag.map_cardinality = int(np.argmax(cardinality_distribution(result)))
    diag.cpu_seconds = time.process_time() - started_cpu
    diag.wall_seconds = time.perf_counter() - started_wall
    logger.debug(
        f"scan {Z.scan}: {len(g.hypotheses)} parents -> {diag.n_hypotheses} hypotheses, "
        f"{diag.n_unique_samples} unique maps"
    )
    return UpdateResult(result, diag)


def joint_predict_update(
    g: GlmbDensity,
    Z: MeasurementFrame,
    models: ModelSet,
    budget: TruncationBudget,
    seed: int = 0,
) -> GlmbDensity:
    return predict_update_scan(g, Z, models, budget, seed).density


def cardinality_distribution(g: GlmbDensity) -> np.ndarray:
    """``Pr(n)`` for ``n = 0..max |I|``."""
    if not g.hypotheses:
        raise DomainError("GLMB density has no hypotheses")
    sizes = np.array([h.cardinality for h in g.hypotheses])
    weights = np.exp(g.log_weights())
    return np.bincount(sizes, weights=weights, minlength=int(sizes.max()) + 1)


def extract_estimate(g: GlmbDensity) -> List[Tuple[Label, np.ndarray]]:
    """
    Labels and posterior means of the best hypothesis with the MAP cardinality.

    Cardinality ties go to the smaller ``n``; weight ties to the first hypothesis.
    """
    n_star = int(np.argmax(cardinality_distribution(g)))
    best: Optional[GlmbHypothesis] = None
    for h in g.hypotheses:
        if h.cardinality == n_star and (best is None or h.log_weight > best.log_weight):
            best = h
    return [(label, np.array(best.densities[label].mean)) for label in best.labels]

"""
Gibbs sampler kernels for the truncation step.

All kernels share one contract: ``run(gamma0, eta, cfg) -> SampleBatch``
with ``cfg.iterations`` emitted iterates. Every chain owns a
``numpy.random.Generator`` on a counter-based ``Philox`` stream seeded from
``cfg.seed``; uniforms are drawn in blocks and categorical draws invert the
cumulative sum of the (unnormalized) weights.

Kernels
-------
- ``tgs_plus_run``   tempered coordinate choice, mixture proposal, importance weights.
- ``rgs_plus_run``   uniform coordinate choice, exact conditional, O(P+M) per step.
- ``dgs_plus_run``   periodic coordinate choice, mixture proposal, O(M) per step.
- ``sgs_plus_run``   full systematic sweep per emitted iterate, O(PM) per sweep.
- ``rgs_run`` / ``sgs_run``   baselines that rebuild each conditional from scratch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence

import numpy as np

from app.schemas.sampler import SamplerConfig, SamplerVariant
from app.services.assignment.core import CostMatrix, WeightedAssignment, masked_row
from app.services.gibbs.state import apply_move, check_start, init_state, rho_tilde, zeros_map

logger = logging.getLogger(__name__)

UNIFORM_BLOCK = 65_536


@dataclass
class SampleBatch:
    iterates: np.ndarray
    variant: SamplerVariant
    cost_matrix: CostMatrix
    importance_log_weights: Optional[np.ndarray] = None
    meta: Dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.iterates.shape[0])

    def __iter__(self) -> Iterator[tuple]:
        for row in self.iterates:
            yield tuple(int(v) for v in row)


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


class _Uniforms:
    """Block-buffered stream of Uniform[0, 1) draws."""

    def __init__(self, rng: np.random.Generator, total: int):
        self._rng = rng
        self._left = total
        self._buf = np.empty(0)
        self._pos = 0

    def next(self) -> float:
        if self._pos >= self._buf.size:
            size = max(1, min(UNIFORM_BLOCK, self._left))
            self._buf = self._rng.random(size)
            self._left -= size
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)


def _categorical(weights: np.ndarray, u: float) -> int:
    cdf = np.cumsum(weights)
    k = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(k, weights.size - 1)


def _uniform_index(P: int, u: float) -> int:
    return min(int(u * P), P - 1)


def tgs_plus_run(gamma0: Sequence[int], eta: CostMatrix, cfg: SamplerConfig) -> SampleBatch:
    """
    Tempered Gibbs sampler with O(P + M) work per iterate.

    Each step draws a coordinate from ``rho``, draws its new index from the
    alpha/beta mixture proposal, propagates the conditionals and refreshes
    ``rho`` when the index changed. The log importance weight of iterate
    ``t`` is ``ln P - ln sum(rho_tilde(gamma_t))``.
    """
    alpha, beta = cfg.alpha, cfg.beta
    state = init_state(gamma0, eta, alpha, beta)
    values = eta.values
    pi, nu1, nu_beta, cur = state.pi_tilde, state.nu1, state.nu_beta, state.current
    P, T = eta.P, cfg.iterations
    log_P = float(np.log(P))

    rt = rho_tilde(values, cur, nu1, nu_beta, alpha, beta)
    log_sum = float(np.log(rt.sum()))
    out = np.empty((T, P), dtype=np.int64)
    log_w = np.empty(T)
    uniforms = _Uniforms(make_generator(cfg.seed), 2 * T)

    for t in range(T):
        n = _categorical(rt, uniforms.next())
        row = pi[n]
        phi = alpha * row / nu1[n] + (1.0 - alpha) * row ** beta / nu_beta[n]
        j = _categorical(phi, uniforms.next()) - 1
        old = int(cur[n])
        if j != old:
            apply_move(pi, nu1, nu_beta, values, beta, n, old, j)
            cur[n] = j
            rt = rho_tilde(values, cur, nu1, nu_beta, alpha, beta)
            log_sum = float(np.log(rt.sum()))
        out[t] = cur
        log_w[t] = log_P - log_sum

    return SampleBatch(out, SamplerVariant.TGS_PLUS, eta, importance_log_weights=log_w)


def rgs_plus_run(gamma0: Sequence[int], eta: CostMatrix, cfg: SamplerConfig) -> SampleBatch:
    """Random-scan Gibbs with incremental conditionals; ``nu_beta`` is not tracked."""
    state = init_state(gamma0, eta, 1.0, 1.0)
    values = eta.values
    pi, nu1, cur = state.pi_tilde, state.nu1, state.current
    P, T = eta.P, cfg.iterations
    out = np.empty((T, P), dtype=np.int64)
    uniforms = _Uniforms(make_generator(cfg.seed), 2 * T)

    for t in range(T):
        n = _uniform_index(P, uniforms.next())
        j = _categorical(pi[n], uniforms.next()) - 1
        old = int(cur[n])
        if j != old:
            apply_move(pi, nu1, None, values, 1.0, n, old, j)
            cur[n] = j
        out[t] = cur

    return SampleBatch(out, SamplerVariant.RGS_PLUS, eta)


def _rebuild_row(pi: np.ndarray, values: np.ndarray, cur: np.ndarray, n: int, m: int) -> None:
    """
    Rebuild row ``n`` from row ``m`` in O(M).

    Row ``m`` was built after every coordinate except ``m`` last moved, so its
    zeros are exactly the indices held by coordinates other than ``m``. Adding
    ``cur[m]`` and removing ``cur[n]`` gives the indices held by coordinates
    other than ``n``.
    """
    occupied = pi[m] == 0.0
    if cur[m] > 0:
        occupied[cur[m] + 1] = True
    if cur[n] > 0:
        occupied[cur[n] + 1] = False
    pi[n] = np.where(occupied, 0.0, values[n])


def dgs_scan_coordinates(t: int, P: int, backward: bool = False) -> tuple[int, int]:
    """
    Current and previous coordinate (0-based) of the periodic scan at step ``t >= 1``.

    Python's ``%`` is the mathematical modulo, so ``t = 1`` yields the last
    coordinate (forward) or the first one (backward) as the previous one.
    """
    n = (t - 1) % P
    m = (t - 2) % P
    if backward:
        return P - 1 - n, P - 1 - m
    return n, m


def dgs_plus_run(
    gamma0: Sequence[int],
    eta: CostMatrix,
    cfg: SamplerConfig,
    backward: Optional[bool] = None,
) -> SampleBatch:
    """Deterministic-scan Gibbs with the mixture proposal and O(M) row rebuilds."""
    if backward is None:
        backward = cfg.variant is SamplerVariant.DGS_PLUS_BWD
    alpha, beta = cfg.alpha, cfg.beta
    state = init_state(gamma0, eta, alpha, beta)
    values = eta.values
    pi, cur = state.pi_tilde, state.current
    P, T = eta.P, cfg.iterations
    out = np.empty((T, P), dtype=np.int64)
    uniforms = _Uniforms(make_generator(cfg.seed), T)

    for t in range(1, T + 1):
        n, m = dgs_scan_coordinates(t, P, backward)
        if P > 1:
            _rebuild_row(pi, values, cur, n, m)
        row = pi[n]
        if alpha < 1.0:
            tempered = row ** beta
            phi = alpha * row / row.sum() + (1.0 - alpha) * tempered / tempered.sum()
        else:
            phi = row
        cur[n] = _categorical(phi, uniforms.next()) - 1
        out[t - 1] = cur

    variant = SamplerVariant.DGS_PLUS_BWD if backward else SamplerVariant.DGS_PLUS_FWD
    return SampleBatch(out, variant, eta)


def sgs_plus_run(gamma0: Sequence[int], eta: CostMatrix, cfg: SamplerConfig) -> SampleBatch:
    """Systematic-scan Gibbs: one full sweep per emitted iterate, O(PM) per sweep."""
    state = init_state(gamma0, eta, 1.0, 1.0)
    values = eta.values
    pi, cur = state.pi_tilde, state.current
    P, T = eta.P, cfg.iterations
    out = np.empty((T, P), dtype=np.int64)
    uniforms = _Uniforms(make_generator(cfg.seed), T * P)

    for t in range(T):
        for n in range(P):
            if P > 1:
                _rebuild_row(pi, values, cur, n, (n - 1) % P)
            cur[n] = _categorical(pi[n], uniforms.next()) - 1
        out[t] = cur

    return SampleBatch(out, SamplerVariant.SGS_PLUS, eta)


def rgs_run(gamma0: Sequence[int], eta: CostMatrix, cfg: SamplerConfig) -> SampleBatch:
    """Random-scan baseline: every conditional recomputed from scratch, O(PM) per step."""
    cur = check_start(gamma0, eta)
    values = eta.values
    P, T = eta.P, cfg.iterations
    out = np.empty((T, P), dtype=np.int64)
    uniforms = _Uniforms(make_generator(cfg.seed), 2 * T)

    for t in range(T):
        n = _uniform_index(P, uniforms.next())
        cur[n] = _categorical(masked_row(n, cur, values), uniforms.next()) - 1
        out[t] = cur

    return SampleBatch(out, SamplerVariant.RGS_GENERIC, eta)


def sgs_run(gamma0: Sequence[int], eta: CostMatrix, cfg: SamplerConfig) -> SampleBatch:
    """Systematic-scan baseline: O(P^2 M) per sweep."""
    cur = check_start(gamma0, eta)
    values = eta.values
    P, T = eta.P, cfg.iterations
    out = np.empty((T, P), dtype=np.int64)
    uniforms = _Uniforms(make_generator(cfg.seed), T * P)

    for t in range(T):
        for n in range(P):
            cur[n] = _categorical(masked_row(n, cur, values), uniforms.next()) - 1
        out[t] = cur

    return SampleBatch(out, SamplerVariant.SGS_GENERIC, eta)


KERNELS: Dict[SamplerVariant, Callable[[Sequence[int], CostMatrix, SamplerConfig], SampleBatch]] = {
    SamplerVariant.TGS_PLUS: tgs_plus_run,
    SamplerVariant.RGS_PLUS: rgs_plus_run,
    SamplerVariant.DGS_PLUS_FWD: dgs_plus_run,
    SamplerVariant.DGS_PLUS_BWD: dgs_plus_run,
    SamplerVariant.SGS_PLUS: sgs_plus_run,
    SamplerVariant.RGS_GENERIC: rgs_run,
    SamplerVariant.SGS_GENERIC: sgs_run,
}


def run_sampler(gamma0: Optional[Sequence[int]], eta: CostMatrix, cfg: SamplerConfig) -> SampleBatch:
    """Dispatch on ``cfg.variant``; ``gamma0=None`` starts from the all-zeros map."""
    start = zeros_map(eta.P) if gamma0 is None else gamma0
    return KERNELS[cfg.variant](start, eta, cfg)


def dedup(batch: SampleBatch) -> List[WeightedAssignment]:
    """Unique iterates in first-occurrence order, each with its joint log weight."""
    if len(batch) == 0:
        return []
    unique, first = np.unique(batch.iterates, axis=0, return_index=True)
    order = np.argsort(first, kind="stable")
    unique = unique[order]
    log_eta = batch.cost_matrix.log_values
    log_w = log_eta[np.arange(unique.shape[1])[None, :], unique + 1].sum(axis=1)
    return [
        WeightedAssignment(tuple(int(v) for v in row), float(w))
        for row, w in zip(unique, log_w)
    ]

"""
Wall-clock micro-benchmarks of the sampler kernels.

Each (variant, P, M) cell runs the kernel on a random cost matrix with
``timeit``: one untimed warm-up call, then ``repetitions`` timed calls. The
reported figure is the median time of a call divided by the number of
emitted iterates (sweeps for the systematic-scan variants). Absolute values
are machine-bound; only ratios between cells are meaningful.
"""

from __future__ import annotations

import itertools
import logging
import statistics
import timeit
from dataclasses import astuple, dataclass
from functools import partial
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from app.core.decorators import log_action
from app.core.exceptions import DomainError
from app.schemas.sampler import SamplerConfig, SamplerVariant
from app.services.assignment.core import CostMatrix, random_cost_matrix
from app.services.bench.reports import write_kernel_timings
from app.services.gibbs.samplers import run_sampler

logger = logging.getLogger(__name__)

MIN_REPETITIONS = 5


@dataclass(frozen=True)
class KernelTiming:
    variant: str
    P: int
    M: int
    iterations: int
    median_seconds_per_iteration: float
    repetitions: int


def bench_matrix(P: int, M: int, seed: int = 0) -> CostMatrix:
    """Random positive cost matrix, identical for a given ``(P, M, seed)``."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), P, M])))
    return random_cost_matrix(P, M, rng)


def time_kernel(
    eta: CostMatrix,
    cfg: SamplerConfig,
    repetitions: int = MIN_REPETITIONS,
    warmup: int = 1,
) -> float:
    """Median seconds per emitted iterate of ``cfg.variant`` on ``eta``."""
    if repetitions < MIN_REPETITIONS:
        raise DomainError(f"need at least {MIN_REPETITIONS} repetitions, got {repetitions}")
    timer = timeit.Timer(partial(run_sampler, None, eta, cfg))
    if warmup > 0:
        timer.repeat(repeat=warmup, number=1)
    samples = timer.repeat(repeat=repetitions, number=1)
    return statistics.median(samples) / cfg.iterations


@log_action(action_type="bench", action_name="bench_kernels")
def bench_kernels(
    Ps: Sequence[int],
    Ms: Sequence[int],
    iterations: int,
    variants: Iterable[SamplerVariant],
    repetitions: int = MIN_REPETITIONS,
    seed: int = 0,
    paired: bool = False,
    out: Optional[Union[str, Path]] = None,
) -> List[KernelTiming]:
    """
    Time every variant on every ``(P, M)`` cell.

    Cells are the Cartesian product of ``Ps`` and ``Ms``, or ``zip(Ps, Ms)``
    when ``paired``. With ``out`` set, the timings are also written as CSV.
    """
    if paired and len(Ps) != len(Ms):
        raise DomainError("paired P and M lists must have the same length")
    cells = list(zip(Ps, Ms)) if paired else list(itertools.product(Ps, Ms))
    variants = [SamplerVariant(v) for v in variants]
    timings: List[KernelTiming] = []
    for P, M in cells:
        eta = bench_matrix(P, M, seed)
        for variant in variants:
            cfg = SamplerConfig(variant=variant, iterations=iterations, seed=seed)
            per_iteration = time_kernel(eta, cfg, repetitions)
            timings.append(KernelTiming(variant.value, P, M, iterations, per_iteration, repetitions))
            logger.info(f"{variant.value} P={P} M={M}: {per_iteration * 1e6:.2f} us/iteration")
    if out is not None:
        write_kernel_timings(out, [astuple(t) for t in timings])
    return timings


def scaling_ratio(timings: Sequence[KernelTiming], variant: str, small: tuple, large: tuple) -> float:
    """Per-iteration time at ``large = (P, M)`` over the time at ``small``."""
    lookup = {(t.variant, t.P, t.M): t.median_seconds_per_iteration for t in timings}
    return lookup[(variant, *large)] / lookup[(variant, *small)]

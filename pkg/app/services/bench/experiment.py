"""
Monte Carlo experiment runner.

For every grid point and trial, one scenario is simulated and then filtered
once per configured sampler variant. The scenario seed depends only on the
root seed and the trial index, so every variant and every grid point of a
trial see the same random births, motions and clutter draws (only the swept
parameter differs). Trials run in a process pool; the parent process is the
single writer of every report file.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from app.core.config import settings
from app.core.decorators import log_action
from app.core.run_context import get_run_id, new_run_id, set_run_id, trial_scope
from app.schemas.experiment import ExperimentConfig, MetricParams
from app.schemas.filter import TruncationBudget
from app.schemas.sampler import SamplerVariant
from app.schemas.scenario import ScenarioParams
from app.services.bench.reports import (
    aggregate_results,
    grid_label,
    read_aggregate,
    write_raw,
    write_timings,
    write_trials,
)
from app.services.filter.tracker import TrackingResult, run_filter
from app.services.models.gaussian import ModelSet
from app.services.scenario import (
    ScenarioTruth,
    ospa2,
    simulate_scenario,
    tracks_from_estimates,
    tracks_from_truth,
)
from app.services.scenario.metrics import ospa_per_scan

logger = logging.getLogger(__name__)

SCENARIO_STREAM = 0
FILTER_STREAM = 1


def derive_seed(root: int, *keys: int) -> int:
    """64-bit seed of the ``SeedSequence`` spawned from ``root`` and ``keys``."""
    ss = np.random.SeedSequence([int(root), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class TrialTask:
    grid_index: int
    grid_value: Optional[float]
    trial: int
    scenario: ScenarioParams
    truncation: TruncationBudget
    variants: List[SamplerVariant]
    metrics: MetricParams
    seed: int
    run_id: Optional[str] = None


@dataclass
class TrialOutcome:
    grid_index: int
    trial: int
    raw_rows: List[list] = field(default_factory=list)
    trial_rows: List[list] = field(default_factory=list)
    timing_rows: List[list] = field(default_factory=list)


@dataclass
class ExperimentReport:
    output_dir: Path
    raw_files: List[Path]
    trials_file: Path
    timings_file: Path
    aggregate_file: Path


def windowed_ospa2(truth: ScenarioTruth, result: TrackingResult, metrics: MetricParams) -> float:
    """OSPA2 over the whole run, or its mean over sliding windows ending at every scan."""
    truth_tracks = tracks_from_truth(truth)
    estimated = tracks_from_estimates(result.estimates)
    c, p = metrics.cutoff, metrics.order
    if metrics.ospa2_window is None:
        return ospa2(truth_tracks, estimated, window=range(truth.duration), p=p, c=c)
    L = metrics.ospa2_window
    values = [
        ospa2(truth_tracks, estimated, window=range(max(0, k - L + 1), k + 1), p=p, c=c)
        for k in range(truth.duration)
    ]
    return float(np.mean(values))


def run_trial(task: TrialTask) -> TrialOutcome:
    """Simulate one scenario and filter it with every variant."""
    if task.run_id is not None:
        set_run_id(task.run_id)
    outcome = TrialOutcome(task.grid_index, task.trial)
    label = grid_label(task.grid_value)
    with trial_scope(task.grid_index, task.trial):
        scenario = task.scenario.model_copy(
            update={"seed": derive_seed(task.seed, SCENARIO_STREAM, task.trial)}
        )
        models = ModelSet.from_params(scenario)
        truth, frames = simulate_scenario(scenario, models)
        filter_seed = derive_seed(task.seed, FILTER_STREAM, task.trial)
        c, p = task.metrics.cutoff, task.metrics.order

        for variant in task.variants:
            budget = task.truncation.model_copy(
                update={"sampler": task.truncation.sampler.model_copy(update={"variant": variant})}
            )
            result = run_filter(frames, models, budget, seed=filter_seed)
            per_scan = ospa_per_scan(truth, result.estimates, p=p, c=c)
            for diag, value in zip(result.diagnostics, per_scan):
                outcome.raw_rows.append([
                    label, task.trial, variant.value, diag.scan,
                    diag.n_hypotheses, diag.n_unique_samples, diag.map_cardinality, float(value),
                ])
                outcome.timing_rows.append([
                    task.grid_index, label, task.trial, variant.value, diag.scan,
                    float(diag.wall_seconds), float(diag.cpu_seconds), float(diag.kernel_seconds),
                ])
            outcome.trial_rows.append([
                task.grid_index, label, task.trial, variant.value,
                float(np.mean([d.n_hypotheses for d in result.diagnostics])),
                float(np.mean([d.n_unique_samples for d in result.diagnostics])),
                float(np.mean(per_scan)),
                windowed_ospa2(truth, result, task.metrics),
                len(truth.tracks),
                len(result.trajectories),
            ])
            if not all(math.isfinite(v) for v in per_scan):
                logger.warning(f"non-finite OSPA in trial {task.trial} for {variant.value}")
    return outcome


def build_tasks(cfg: ExperimentConfig, run_id: Optional[str] = None) -> List[TrialTask]:
    tasks = []
    for grid_index, value in enumerate(cfg.grid()):
        scenario, truncation = cfg.at_grid_value(value)
        for trial in range(cfg.trials):
            tasks.append(
                TrialTask(
                    grid_index, value, trial, scenario, truncation,
                    list(cfg.variants), cfg.metrics, cfg.seed, run_id,
                )
            )
    return tasks


@log_action(action_type="experiment", action_name="run_experiment")
def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentReport:
    """
    Run every grid point x trial x variant and write the report files.

    ``workers`` defaults to ``settings.MAX_WORKERS``; with one worker the
    trials run in this process. Results are written in task order whatever
    the completion order, so the deterministic files do not depend on
    ``workers``.
    """
    workers = settings.MAX_WORKERS if workers is None else workers
    run_id = get_run_id() or new_run_id()
    tasks = build_tasks(cfg, run_id)
    out = Path(cfg.output_dir)
    logger.info(
        f"experiment: {len(cfg.grid())} grid points x {cfg.trials} trials x "
        f"{len(cfg.variants)} variants, {workers} worker(s), output {out}"
    )

    raw_files: List[Path] = []
    trial_rows: List[list] = []
    timing_rows: List[list] = []

    def collect(outcome: TrialOutcome) -> None:
        raw_files.append(write_raw(out, outcome.grid_index, outcome.trial, outcome.raw_rows))
        trial_rows.extend(outcome.trial_rows)
        timing_rows.extend(outcome.timing_rows)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for outcome in pool.map(run_trial, tasks):
                collect(outcome)
    else:
        for task in tasks:
            collect(run_trial(task))

    trials_file = write_trials(out, trial_rows)
    timings_file = write_timings(out, timing_rows)
    aggregate_file = aggregate_results(out)
    return ExperimentReport(out, raw_files, trials_file, timings_file, aggregate_file)


def summarize(report: ExperimentReport) -> Dict[str, Dict[str, float]]:
    """``variant -> {metric: mean}`` over every grid point, read back from ``aggregate.csv``."""
    sums: Dict[str, Dict[str, List[float]]] = {}
    for rec in read_aggregate(report.output_dir):
        bucket = sums.setdefault(rec["variant"], {})
        for column in ("mean_unique_samples", "mean_ospa", "mean_ospa2", "mean_scan_seconds"):
            bucket.setdefault(column, []).append(float(rec[column]))
    return {v: {k: float(np.mean(vals)) for k, vals in cols.items()} for v, cols in sums.items()}

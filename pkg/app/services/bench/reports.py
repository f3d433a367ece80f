"""
Report files of the experiment and benchmark commands.

Layout under an experiment's output directory::

    raw/grid<g>_trial<t>.csv   per-scan metrics of one trial, every variant
    trials.csv                 per-trial summary (one row per grid x trial x variant)
    timings.csv                per-scan wall-clock and kernel time
    aggregate.csv              mean and std per grid point x variant

``raw/`` and ``trials.csv`` depend only on the config and seed. Timings do
not, so they live in their own file, and ``aggregate.csv`` is rebuilt from
``trials.csv`` and ``timings.csv`` by :func:`aggregate_results`.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.services.scenario.io import fmt, read_rows, write_rows

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

RAW_COLUMNS = [
    "grid_value",
    "trial",
    "variant",
    "scan",
    "n_hypotheses",
    "n_unique_samples",
    "map_cardinality",
    "ospa",
]
TRIAL_COLUMNS = [
    "grid_index",
    "grid_value",
    "trial",
    "variant",
    "mean_n_hypotheses",
    "mean_unique_samples",
    "mean_ospa",
    "ospa2",
    "n_true_tracks",
    "n_estimated_tracks",
]
TIMING_COLUMNS = [
    "grid_index",
    "grid_value",
    "trial",
    "variant",
    "scan",
    "wall_seconds",
    "cpu_seconds",
    "kernel_seconds",
]
AGGREGATE_COLUMNS = [
    "grid_index",
    "grid_value",
    "variant",
    "n_trials",
    "mean_unique_samples",
    "std_unique_samples",
    "mean_n_hypotheses",
    "std_n_hypotheses",
    "mean_ospa",
    "std_ospa",
    "mean_ospa2",
    "std_ospa2",
    "mean_scan_seconds",
    "std_scan_seconds",
    "mean_kernel_seconds",
]
KERNEL_COLUMNS = ["variant", "P", "M", "iterations", "median_seconds_per_iteration", "repetitions"]

# trials.csv column -> aggregate.csv stem
_TRIAL_METRICS = {
    "mean_unique_samples": "unique_samples",
    "mean_n_hypotheses": "n_hypotheses",
    "mean_ospa": "ospa",
    "ospa2": "ospa2",
}


def grid_label(value: Optional[float]) -> str:
    """Text of a grid value in every report; empty when nothing is swept."""
    return "" if value is None else fmt(value)


def raw_path(output_dir: PathLike, grid_index: int, trial: int) -> Path:
    return Path(output_dir) / "raw" / f"grid{grid_index}_trial{trial}.csv"


def write_raw(output_dir: PathLike, grid_index: int, trial: int, rows: Sequence[Sequence]) -> Path:
    return write_rows(raw_path(output_dir, grid_index, trial), RAW_COLUMNS, rows)


def write_trials(output_dir: PathLike, rows: Sequence[Sequence]) -> Path:
    return write_rows(Path(output_dir) / "trials.csv", TRIAL_COLUMNS, rows)


def write_timings(output_dir: PathLike, rows: Sequence[Sequence]) -> Path:
    return write_rows(Path(output_dir) / "timings.csv", TIMING_COLUMNS, rows)


def write_kernel_timings(path: PathLike, rows: Sequence[Sequence]) -> Path:
    return write_rows(path, KERNEL_COLUMNS, rows)


def _mean_std(values: List[float]) -> Tuple[float, float]:
    if not values:
        return float("nan"), float("nan")
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def aggregate_results(output_dir: PathLike) -> Path:
    """
    Rebuild ``aggregate.csv`` from ``trials.csv`` and ``timings.csv``.

    Groups are ``(grid_index, grid_value, variant)`` in first-seen order.
    Standard deviations are population (``ddof=0``) values over trials; the
    timing columns are taken over every scan of every trial in the group.
    """
    root = Path(output_dir)
    groups: Dict[tuple, Dict[str, List[float]]] = {}
    for rec in read_rows(root / "trials.csv", TRIAL_COLUMNS):
        key = (int(rec["grid_index"]), rec["grid_value"], rec["variant"])
        bucket = groups.setdefault(key, defaultdict(list))
        for column in _TRIAL_METRICS:
            bucket[column].append(float(rec[column]))

    timings_file = root / "timings.csv"
    if timings_file.exists():
        for rec in read_rows(timings_file, TIMING_COLUMNS):
            key = (int(rec["grid_index"]), rec["grid_value"], rec["variant"])
            if key in groups:
                groups[key]["wall_seconds"].append(float(rec["wall_seconds"]))
                groups[key]["kernel_seconds"].append(float(rec["kernel_seconds"]))

    rows = []
    for (grid_index, grid_value, variant), bucket in groups.items():
        row: list = [grid_index, grid_value, variant, len(bucket["ospa2"])]
        for column in _TRIAL_METRICS:
            row.extend(_mean_std(bucket[column]))
        row.extend(_mean_std(bucket["wall_seconds"]))
        row.append(_mean_std(bucket["kernel_seconds"])[0])
        rows.append(row)
    path = write_rows(root / "aggregate.csv", AGGREGATE_COLUMNS, rows)
    logger.info(f"aggregated {len(rows)} grid x variant groups into {path}")
    return path


def read_aggregate(output_dir: PathLike) -> List[dict]:
    return read_rows(Path(output_dir) / "aggregate.csv", AGGREGATE_COLUMNS)

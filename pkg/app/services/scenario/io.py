"""
CSV readers and writers for truth, measurements, estimates and filter diagnostics.

All files are UTF-8, comma-separated, with a header row. Floats are written
with ``settings.CSV_FLOAT_FORMAT`` so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError, ReportWriteError
from app.services.models.gaussian import Label
from app.services.scenario.types import MeasurementFrame, ScenarioTruth, TruthTrack

PathLike = Union[str, Path]

TRUTH_COLUMNS = ["scan", "label_birth", "label_index", "x", "y", "vx", "vy"]
MEASUREMENT_COLUMNS = ["scan", "zx", "zy"]
ESTIMATE_COLUMNS = TRUTH_COLUMNS
DIAGNOSTIC_COLUMNS = ["scan", "n_hypotheses", "n_unique_samples", "map_cardinality", "cpu_seconds"]


def fmt(value: float) -> str:
    return format(float(value), settings.CSV_FLOAT_FORMAT)


def write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    except OSError as exc:
        raise ReportWriteError(f"cannot write {target}: {exc}") from exc
    return target


def read_rows(path: PathLike, header: Sequence[str]) -> List[dict]:
    try:
        with Path(path).open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            missing = set(header) - set(reader.fieldnames or [])
            if missing:
                raise DomainError(f"{path}: missing columns {sorted(missing)}")
            return list(reader)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc


def _state_row(scan: int, label: Label, state: np.ndarray) -> list:
    x, vx, y, vy = (float(v) for v in state)
    return [scan, label.birth_time, label.index, x, y, vx, vy]


def write_truth_csv(truth: ScenarioTruth, path: PathLike) -> Path:
    rows = []
    for k in range(truth.duration):
        for track in truth.live_at(k):
            rows.append(_state_row(k, track.label, track.state_at(k)))
    return write_rows(path, TRUTH_COLUMNS, rows)


def read_truth_csv(path: PathLike, duration: int | None = None) -> ScenarioTruth:
    per_label: dict = {}
    last_scan = -1
    for rec in read_rows(path, TRUTH_COLUMNS):
        k = int(rec["scan"])
        label = Label(int(rec["label_birth"]), int(rec["label_index"]))
        state = [float(rec["x"]), float(rec["vx"]), float(rec["y"]), float(rec["vy"])]
        per_label.setdefault(label, []).append((k, state))
        last_scan = max(last_scan, k)
    tracks = []
    for label, entries in sorted(per_label.items()):
        entries.sort(key=lambda e: e[0])
        scans = [e[0] for e in entries]
        if scans != list(range(scans[0], scans[0] + len(scans))):
            raise DomainError(f"track {label} has non-consecutive scans")
        tracks.append(TruthTrack(label, scans[0], np.array([e[1] for e in entries])))
    return ScenarioTruth(duration if duration is not None else last_scan + 1, tracks)


def write_measurements_csv(frames: Sequence[MeasurementFrame], path: PathLike) -> Path:
    rows = [[f.scan, float(z[0]), float(z[1])] for f in frames for z in f.points]
    return write_rows(path, MEASUREMENT_COLUMNS, rows)


def read_measurements_csv(path: PathLike, duration: int | None = None) -> List[MeasurementFrame]:
    """Frames for scans ``0..duration-1``; scans without rows become empty frames."""
    points: dict = {}
    for rec in read_rows(path, MEASUREMENT_COLUMNS):
        points.setdefault(int(rec["scan"]), []).append([float(rec["zx"]), float(rec["zy"])])
    n_scans = duration if duration is not None else (max(points) + 1 if points else 0)
    return [MeasurementFrame(k, np.array(points.get(k, [])).reshape(-1, 2)) for k in range(n_scans)]


def write_estimates_csv(estimates, path: PathLike) -> Path:
    rows = [
        _state_row(est.scan, label, state)
        for est in estimates
        for label, state in zip(est.labels, est.states)
    ]
    return write_rows(path, ESTIMATE_COLUMNS, rows)


def write_diagnostics_csv(diagnostics, path: PathLike) -> Path:
    rows = [
        [d.scan, d.n_hypotheses, d.n_unique_samples, d.map_cardinality, float(d.cpu_seconds)]
        for d in diagnostics
    ]
    return write_rows(path, DIAGNOSTIC_COLUMNS, rows)

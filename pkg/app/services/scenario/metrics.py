"""
OSPA between point sets and OSPA-on-OSPA between track sets.

A track is a mapping ``scan -> 2D position``; a track set maps a key (the
label) to its track. The base distance between two tracks over a window is
the average, over the scans where at least one of them exists, of the
cut-off distance ``min(c, |x - y|)`` when both exist and ``c`` when only one
does. OSPA over tracks then uses that base distance.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.core.exceptions import DomainError
from app.services.scenario.types import ScenarioTruth

Track = Dict[int, np.ndarray]
TrackSet = Dict[Hashable, Track]


def _check_params(p: float, c: float) -> None:
    if p < 1.0:
        raise DomainError(f"OSPA order must be >= 1, got {p}")
    if c <= 0.0:
        raise DomainError(f"OSPA cutoff must be > 0, got {c}")


def _ospa_from_distances(D: np.ndarray, n_x: int, n_y: int, p: float, c: float) -> float:
    """OSPA given the pairwise base-distance matrix ``D`` of shape ``(n_x, n_y)``."""
    if n_x == 0 and n_y == 0:
        return 0.0
    if n_x == 0 or n_y == 0:
        return float(c)
    cost = np.minimum(D, c) ** p
    rows, cols = linear_sum_assignment(cost)
    n = max(n_x, n_y)
    total = cost[rows, cols].sum() + c ** p * abs(n_x - n_y)
    return float((total / n) ** (1.0 / p))


def _as_points(X) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.size == 0:
        return np.empty((0, arr.shape[-1] if arr.ndim == 2 else 2))
    return arr.reshape(-1, arr.shape[-1]) if arr.ndim > 1 else arr.reshape(1, -1)


def ospa(X: np.ndarray, Y: np.ndarray, p: float = 1.0, c: float = 100.0) -> float:
    """OSPA distance between two finite point sets given as ``(n, d)`` arrays."""
    _check_params(p, c)
    X, Y = _as_points(X), _as_points(Y)
    if X.shape[0] == 0 or Y.shape[0] == 0:
        return _ospa_from_distances(np.empty((0, 0)), X.shape[0], Y.shape[0], p, c)
    D = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=2)
    return _ospa_from_distances(D, X.shape[0], Y.shape[0], p, c)


def _restrict(tracks: Mapping[Hashable, Track], window: Sequence[int]) -> List[Track]:
    scans = set(window)
    out = []
    for track in tracks.values():
        kept = {k: np.asarray(v, dtype=float) for k, v in track.items() if k in scans}
        if kept:
            out.append(kept)
    return out


def track_base_distance(a: Track, b: Track, c: float) -> float:
    """Time-averaged cut-off distance over the union of the two tracks' scans."""
    domain = set(a) | set(b)
    if not domain:
        return 0.0
    total = 0.0
    for k in domain:
        if k in a and k in b:
            total += min(c, float(np.linalg.norm(a[k] - b[k])))
        else:
            total += c
    return total / len(domain)


def ospa2(
    A: Mapping[Hashable, Track],
    B: Mapping[Hashable, Track],
    window: Optional[Iterable[int]] = None,
    p: float = 1.0,
    c: float = 100.0,
) -> float:
    """
    OSPA over track sets on ``window`` (default: every scan present in either set).

    Tracks with no state inside the window are ignored.
    """
    _check_params(p, c)
    if window is None:
        window = sorted({k for tracks in (A, B) for t in tracks.values() for k in t})
    window = list(window)
    ta, tb = _restrict(A, window), _restrict(B, window)
    D = np.array([[track_base_distance(x, y, c) for y in tb] for x in ta]).reshape(len(ta), len(tb))
    return _ospa_from_distances(D, len(ta), len(tb), p, c)


def tracks_from_truth(truth: ScenarioTruth) -> TrackSet:
    return {
        t.label: {t.start_scan + i: s[[0, 2]] for i, s in enumerate(t.states)}
        for t in truth.tracks
    }


def tracks_from_estimates(estimates) -> TrackSet:
    """Track set from per-scan estimates (objects with ``scan``, ``labels`` and ``states``)."""
    out: TrackSet = {}
    for est in estimates:
        for label, state in zip(est.labels, est.states):
            out.setdefault(label, {})[est.scan] = np.asarray(state)[[0, 2]]
    return out


def ospa_per_scan(truth: ScenarioTruth, estimates, p: float = 1.0, c: float = 100.0) -> List[float]:
    by_scan = {est.scan: est.positions() for est in estimates}
    return [
        ospa(truth.states_at(k)[:, [0, 2]], by_scan.get(k, np.empty((0, 2))), p, c)
        for k in range(truth.duration)
    ]


def mean_ospa(truth: ScenarioTruth, estimates, p: float = 1.0, c: float = 100.0) -> float:
    values = ospa_per_scan(truth, estimates, p, c)
    return float(np.mean(values)) if values else 0.0

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from app.services.models.gaussian import Label


@dataclass(frozen=True)
class MeasurementFrame:
    scan: int
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class TruthTrack:
    label: Label
    start_scan: int
    states: np.ndarray

    @property
    def end_scan(self) -> int:
        """Last scan (inclusive) with a state."""
        return self.start_scan + int(self.states.shape[0]) - 1

    def state_at(self, k: int) -> np.ndarray | None:
        if self.start_scan <= k <= self.end_scan:
            return self.states[k - self.start_scan]
        return None


@dataclass(frozen=True)
class ScenarioTruth:
    duration: int
    tracks: List[TruthTrack]

    def live_at(self, k: int) -> List[TruthTrack]:
        return [t for t in self.tracks if t.start_scan <= k <= t.end_scan]

    def states_at(self, k: int) -> np.ndarray:
        live = [t.state_at(k) for t in self.live_at(k)]
        return np.array(live).reshape(-1, 4)

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.core.decorators import log_action
from app.schemas.filter import TruncationBudget
from app.services.filter.glmb import (
    GlmbDensity,
    ScanDiagnostics,
    extract_estimate,
    predict_update_scan,
)
from app.services.models.gaussian import Label, ModelSet
from app.services.scenario.types import MeasurementFrame

logger = logging.getLogger(__name__)


@dataclass
class ScanEstimate:
    scan: int
    labels: List[Label]
    states: np.ndarray

    def positions(self) -> np.ndarray:
        return self.states[:, [0, 2]].reshape(-1, 2)


@dataclass
class TrackingResult:
    estimates: List[ScanEstimate] = field(default_factory=list)
    trajectories: Dict[Label, List[Tuple[int, np.ndarray]]] = field(default_factory=dict)
    diagnostics: List[ScanDiagnostics] = field(default_factory=list)
    final_density: GlmbDensity | None = None


class GlmbTracker:
    """
    Runs the GLMB recursion over a sequence of measurement frames.

    Trajectories are reported per label: every scan at which the label is in
    the extracted estimate contributes one ``(scan, state)`` pair.
    """

    def __init__(self, models: ModelSet, budget: TruncationBudget, seed: int = 0):
        self.models = models
        self.budget = budget
        self.seed = seed
        self.density = GlmbDensity.empty()

    def reset(self) -> None:
        self.density = GlmbDensity.empty()

    def step(self, frame: MeasurementFrame) -> Tuple[ScanEstimate, ScanDiagnostics]:
        result = predict_update_scan(self.density, frame, self.models, self.budget, self.seed)
        self.density = result.density
        estimate = extract_estimate(self.density)
        labels = [label for label, _ in estimate]
        states = np.array([state for _, state in estimate]).reshape(-1, 4)
        return ScanEstimate(frame.scan, labels, states), result.diagnostics

    @log_action(action_type="filter", action_name="run_filter", log_params=False)
    def run(self, frames: Sequence[MeasurementFrame]) -> TrackingResult:
        self.reset()
        out = TrackingResult()
        for frame in frames:
            estimate, diag = self.step(frame)
            out.estimates.append(estimate)
            out.diagnostics.append(diag)
            for label, state in zip(estimate.labels, estimate.states):
                out.trajectories.setdefault(label, []).append((frame.scan, state))
        out.final_density = self.density
        if out.diagnostics:
            logger.info(
                f"filtered {len(frames)} scans, "
                f"{np.mean([d.n_unique_samples for d in out.diagnostics]):.1f} unique maps per scan"
            )
        return out


def run_filter(
    frames: Sequence[MeasurementFrame],
    models: ModelSet,
    budget: TruncationBudget,
    seed: int = 0,
) -> TrackingResult:
    return GlmbTracker(models, budget, seed).run(frames)

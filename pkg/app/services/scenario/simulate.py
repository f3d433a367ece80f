"""
Ground truth and measurement simulation.

Truth and measurements use disjoint ``SeedSequence`` substreams of the
scenario seed, so the same truth can be re-observed with a different sensor
seed and every run is bit-reproducible.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional

import numpy as np

from app.core.decorators import log_action
from app.schemas.scenario import ScenarioParams
from app.services.models.gaussian import Label, ModelSet, SensorModel, sample_density
from app.services.scenario.types import MeasurementFrame, ScenarioTruth, TruthTrack

logger = logging.getLogger(__name__)

TRUTH_STREAM = 0
MEASUREMENT_STREAM = 1


def substream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


@log_action(action_type="simulate", action_name="generate_truth")
def generate_truth(
    p: ScenarioParams,
    models: Optional[ModelSet] = None,
    initial: Optional[Dict[Label, np.ndarray]] = None,
) -> ScenarioTruth:
    """
    Random births, motions and deaths over ``p.duration`` scans.

    Per scan, surviving tracks (probability ``P_S``) move through the CV model
    with process noise, then every birth component spawns with probability
    ``P_B``. Tracks whose position leaves the region are terminated. ``initial``
    optionally seeds tracks alive at scan 0.
    """
    models = ModelSet.from_params(p) if models is None else models
    rng = substream(p.seed, TRUTH_STREAM)
    motion, region = models.motion, models.region
    chol_q = np.linalg.cholesky(motion.Q + 1e-12 * np.eye(4))

    alive: Dict[Label, List[np.ndarray]] = {}
    starts: Dict[Label, int] = {}
    finished: List[TruthTrack] = []

    for label, state in (initial or {}).items():
        alive[label] = [np.asarray(state, dtype=float)]
        starts[label] = 0

    for k in range(p.duration):
        if k > 0:
            for label in list(alive):
                survive = rng.random() < motion.ps
                moved = motion.F @ alive[label][-1] + chol_q @ rng.standard_normal(4)
                if survive and region.contains(moved[[0, 2]])[0]:
                    alive[label].append(moved)
                else:
                    finished.append(TruthTrack(label, starts.pop(label), np.array(alive.pop(label))))
        for component in models.birth.at_scan(k):
            if rng.random() < component.pb:
                alive[component.label] = [sample_density(component.density, rng)]
                starts[component.label] = k

    for label, states in alive.items():
        finished.append(TruthTrack(label, starts[label], np.array(states)))
    finished.sort(key=lambda t: t.label)
    logger.info(f"generated {len(finished)} trajectories over {p.duration} scans")
    return ScenarioTruth(p.duration, finished)


def generate_measurements(
    truth: ScenarioTruth,
    s: SensorModel,
    seed: int,
) -> List[MeasurementFrame]:
    """
    Detections with probability ``P_D`` plus Poisson clutter, shuffled per scan.

    Detections falling outside the region are dropped, so every frame stays
    inside the clutter support.
    """
    rng = substream(seed, MEASUREMENT_STREAM)
    chol_r = np.linalg.cholesky(s.R)
    frames: List[MeasurementFrame] = []
    for k in range(truth.duration):
        states = truth.states_at(k)
        detected = rng.random(states.shape[0]) < s.pd
        noise = rng.standard_normal((states.shape[0], 2)) @ chol_r.T
        points = (states @ s.H.T + noise)[detected]
        points = points[s.region.contains(points)] if points.size else points.reshape(0, 2)
        clutter = s.region.sample_uniform(rng, int(rng.poisson(s.clutter_rate)))
        union = np.vstack([points.reshape(-1, 2), clutter])
        frames.append(MeasurementFrame(k, union[rng.permutation(union.shape[0])]))
    return frames


def simulate_scenario(p: ScenarioParams, models: Optional[ModelSet] = None):
    """Truth and measurements for one scenario seed."""
    models = ModelSet.from_params(p) if models is None else models
    truth = generate_truth(p, models)
    return truth, generate_measurements(truth, models.sensor, p.seed)

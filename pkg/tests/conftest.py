import os

# no rotating log file during test runs
os.environ.setdefault("LOG_FILE_PATH", "")

import numpy as np
import pytest

from app.schemas.scenario import BirthParams, RegionParams, ScenarioParams, SensorParams
from app.services.assignment.core import CostMatrix, random_cost_matrix


@pytest.fixture
def eta_2x3() -> CostMatrix:
    """Two labels, one measurement: rows (1, 1, 2) and (1, 1, 3) over j = -1, 0, 1."""
    return CostMatrix.from_rows([[1.0, 1.0, 2.0], [1.0, 1.0, 3.0]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(20240607))


@pytest.fixture
def small_instances(rng):
    """Random P=3, M=2 instances with entries in [0.01, 10]."""
    return [random_cost_matrix(3, 2, rng) for _ in range(3)]


@pytest.fixture
def tiny_scenario() -> ScenarioParams:
    """Short, sparse scenario that filters in well under a second."""
    return ScenarioParams(
        region=RegionParams(x_max=1000.0, y_max=1000.0),
        duration=5,
        sensor=SensorParams(clutter_rate=2.0),
        birth=BirthParams(nx=2, ny=1),
        expected_trajectories=2.0,
        seed=11,
    )

from fastapi import APIRouter
import logging

from app.core.config import settings
from app.core.decorators import log_action
from app.core.exceptions import CapacityError
from app.schemas.api import FrameOut, SimulateResponse, TrackOut
from app.schemas.scenario import ScenarioParams
from app.services.scenario import simulate_scenario

logger = logging.getLogger(__name__)
router = APIRouter()


@router.post("/simulate", response_model=SimulateResponse)
@log_action(action_type="api_endpoint", action_name="simulate")
def simulate(params: ScenarioParams):
    """Simulate truth trajectories and measurement frames for one scenario seed."""
    if params.duration > settings.API_MAX_SCANS:
        raise CapacityError(f"duration {params.duration} exceeds {settings.API_MAX_SCANS} scans per request")
    truth, frames = simulate_scenario(params)
    return SimulateResponse(
        duration=truth.duration,
        tracks=[
            TrackOut(label=list(t.label), start_scan=t.start_scan, states=t.states.tolist())
            for t in truth.tracks
        ],
        frames=[FrameOut(scan=f.scan, points=f.points.tolist()) for f in frames],
    )

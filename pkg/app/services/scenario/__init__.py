from app.services.scenario.metrics import mean_ospa, ospa, ospa2, tracks_from_estimates, tracks_from_truth
from app.services.scenario.simulate import generate_measurements, generate_truth, simulate_scenario
from app.services.scenario.types import MeasurementFrame, ScenarioTruth, TruthTrack

__all__ = [
    "MeasurementFrame",
    "ScenarioTruth",
    "TruthTrack",
    "generate_measurements",
    "generate_truth",
    "mean_ospa",
    "ospa",
    "ospa2",
    "simulate_scenario",
    "tracks_from_estimates",
    "tracks_from_truth",
]

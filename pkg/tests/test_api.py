import math
import uuid

import pytest
from fastapi.testclient import TestClient

from main import app

ETA = [[1.0, 1.0, 2.0], [1.0, 1.0, 3.0]]


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def tiny_scenario_body(**overrides):
    body = {
        "region": {"x_max": 1000.0, "y_max": 1000.0},
        "duration": 5,
        "sensor": {"clutter_rate": 2.0},
        "birth": {"nx": 2, "ny": 1},
        "expected_trajectories": 2.0,
        "seed": 4,
    }
    body.update(overrides)
    return body


class TestService:
    def test_health(self, client):
        resp = client.get("/api/v1/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "healthy"
        uuid.UUID(resp.headers["X-Request-ID"])

    def test_root(self, client):
        resp = client.get("/")
        assert resp.status_code == 200
        assert "version" in resp.json()

    def test_request_id_is_echoed(self, client):
        rid = str(uuid.uuid4())
        resp = client.get("/api/v1/health", headers={"X-Request-ID": rid})
        assert resp.headers["X-Request-ID"] == rid

    def test_malformed_request_id_is_replaced(self, client):
        resp = client.get("/api/v1/health", headers={"X-Request-ID": "not-a-uuid"})
        assert resp.headers["X-Request-ID"] != "not-a-uuid"
        uuid.UUID(resp.headers["X-Request-ID"])


class TestSampling:
    def test_sample_returns_unique_maps_by_weight(self, client):
        body = {"cost_matrix": ETA, "sampler": {"variant": "TGS+", "iterations": 2000, "seed": 1}}
        resp = client.post("/api/v1/sampling/sample", json=body)
        assert resp.status_code == 200
        data = resp.json()
        assert data["variant"] == "TGS+"
        assert data["iterations"] == 2000
        assert 1 <= data["n_unique"] <= 8
        weights = [a["log_weight"] for a in data["assignments"]]
        assert weights == sorted(weights, reverse=True)
        assert weights[0] == pytest.approx(math.log(3.0))
        summary = data["importance_weights"]
        assert 0.0 < summary["effective_sample_size"] <= 2000.0
        assert 0.0 < summary["max_normalized_weight"] <= 1.0

    def test_unweighted_variant_has_no_weight_summary(self, client):
        body = {"cost_matrix": ETA, "sampler": {"variant": "RGS+", "iterations": 200}, "max_results": 2}
        data = client.post("/api/v1/sampling/sample", json=body).json()
        assert data["importance_weights"] is None
        assert len(data["assignments"]) == 2

    def test_initial_map_must_be_valid(self, client):
        body = {"cost_matrix": ETA, "initial": [1, 1]}
        resp = client.post("/api/v1/sampling/sample", json=body)
        assert resp.status_code == 422
        assert resp.json()["error"] == "DomainError"

    def test_non_positive_entry(self, client):
        body = {"cost_matrix": [[1.0, -1.0, 2.0], [1.0, 1.0, 3.0]]}
        resp = client.post("/api/v1/sampling/sample", json=body)
        assert resp.status_code == 422
        assert resp.json()["error"] == "DomainError"

    def test_ragged_rows(self, client):
        body = {"cost_matrix": [[1.0, 1.0, 2.0], [1.0, 1.0]]}
        assert client.post("/api/v1/sampling/sample", json=body).status_code == 422

    def test_unknown_field_is_rejected(self, client):
        body = {"cost_matrix": ETA, "sampler": {"variant": "TGS+", "temperature": 2.0}}
        assert client.post("/api/v1/sampling/sample", json=body).status_code == 422

    def test_iteration_budget(self, client):
        body = {"cost_matrix": ETA, "sampler": {"iterations": 300_000}}
        resp = client.post("/api/v1/sampling/sample", json=body)
        assert resp.status_code == 413
        assert resp.json()["error"] == "CapacityError"

    def test_sweep_budget_counts_coordinates(self, client):
        body = {"cost_matrix": ETA, "sampler": {"variant": "SGS+", "iterations": 150_000}}
        assert client.post("/api/v1/sampling/sample", json=body).status_code == 413

    def test_oracle_check(self, client):
        body = {"cost_matrix": ETA, "sampler": {"variant": "SGS+", "iterations": 50_000, "seed": 2}}
        resp = client.post("/api/v1/sampling/oracle-check", json=body)
        assert resp.status_code == 200
        data = resp.json()
        assert data["n_valid_maps"] == 8
        assert 0.0 <= data["total_variation"] < 0.05

    def test_oracle_check_enumeration_limit(self, client):
        # 4^9 = 262144 maps to enumerate, above API_MAX_ENUMERATION
        body = {"cost_matrix": [[1.0, 1.0, 2.0, 2.0]] * 9, "sampler": {"iterations": 10}}
        resp = client.post("/api/v1/sampling/oracle-check", json=body)
        assert resp.status_code == 422
        assert resp.json()["error"] == "DomainError"
        assert "4^9" in resp.json()["detail"]


class TestScenarios:
    def test_simulate(self, client):
        resp = client.post("/api/v1/scenarios/simulate", json=tiny_scenario_body())
        assert resp.status_code == 200
        data = resp.json()
        assert data["duration"] == 5
        assert [f["scan"] for f in data["frames"]] == [0, 1, 2, 3, 4]
        for track in data["tracks"]:
            assert len(track["label"]) == 2
            assert all(len(state) == 4 for state in track["states"])

    def test_simulate_is_seeded(self, client):
        first = client.post("/api/v1/scenarios/simulate", json=tiny_scenario_body()).json()
        second = client.post("/api/v1/scenarios/simulate", json=tiny_scenario_body()).json()
        assert first == second

    def test_scan_budget(self, client):
        resp = client.post("/api/v1/scenarios/simulate", json=tiny_scenario_body(duration=1000))
        assert resp.status_code == 413

    def test_invalid_scenario(self, client):
        resp = client.post("/api/v1/scenarios/simulate", json=tiny_scenario_body(expected_trajectories=100.0))
        assert resp.status_code == 422

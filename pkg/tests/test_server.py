import pytest
from fastapi.testclient import TestClient

from orchestrator import SpectralOrchestrator
from server import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(SpectralOrchestrator(grid=3, samples=4)))


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["grid"] == 3


def test_builtins(client):
    names = [entry["name"] for entry in client.get("/api/builtins").json()["builtins"]]
    assert "kagome" in names
    assert "zd 3,3" in names


def test_inspect(client):
    response = client.post("/api/inspect", json={"graph": "pendant"})
    assert response.status_code == 200
    assert response.json()["summary"]["degrees"] == [3, 1]


def test_invariants(client):
    response = client.post("/api/invariants", json={"graph": "pendant", "max_n": 2, "potential": ["-2", "2"]})
    assert response.status_code == 200
    body = response.json()
    assert {v["n"]: v["value"] for v in body["periodic_values"]} == {1: "0", 2: "0"}
    values = {(v["n"], tuple(v["m"])): v["value"] for v in body["values"]}
    assert values[(2, (1,))] == "-2"


def test_invariants_with_indices(client):
    response = client.post("/api/invariants", json={"graph": "zd 3,3", "max_n": 3, "indices": [[1, 0]]})
    assert response.status_code == 200
    [lq] = response.json()["linear_quadratic"]
    assert lq["shortest_length"] == 3
    assert len(lq["linear"]["poly"]) == 9


def test_cycles(client):
    response = client.post("/api/cycles", json={"graph": "kagome", "max_len": 2, "index": [1, 0], "base": True})
    assert response.status_code == 200
    assert [c["edges"] for c in response.json()["cycles"]] == [[0, 2]]


def test_isospectral(client):
    request = {"graph": "pendant", "q1": ["0", "0"], "q2": ["-2", "2"]}
    periodic = client.post("/api/isospectral", json={**request, "mode": "periodic"}).json()
    assert periodic["isospectral"] is True
    floquet = client.post("/api/isospectral", json={**request, "mode": "floquet"}).json()
    assert floquet["isospectral"] is False
    assert floquet["witness"]["n"] == 2


def test_isospectral_bad_mode(client):
    response = client.post("/api/isospectral", json={"graph": "pendant", "q1": "zero", "q2": "zero", "mode": "both"})
    assert response.status_code == 400


def test_pendant_partner(client):
    response = client.post("/api/pendant-partner", json={"potential": ["1", "5"]})
    assert response.status_code == 200
    assert response.json()["solutions"][1]["values"] == ["3", "3"]


def test_verify_trace(client):
    response = client.post("/api/verify-trace", json={"graph": "kagome", "potential": ["1", "2", "3"]})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert body["samples"] == 3 * (9 + 4)
    assert "report" not in body


def test_zd_fourier(client):
    response = client.post("/api/zd-fourier", json={"periods": [3, 3], "potential": [str(v) for v in range(9)]})
    assert response.status_code == 200
    assert response.json()["passed"] is True


def test_bad_graph(client):
    response = client.post("/api/invariants", json={"graph": "dim 1\nvertices 1\nedge 0 0 0\n"})
    assert response.status_code == 400
    assert "zero index" in response.json()["detail"]


def test_wrong_potential_length(client):
    response = client.post("/api/invariants", json={"graph": "kagome", "potential": ["1"]})
    assert response.status_code == 400

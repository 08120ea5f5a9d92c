"""
Tests for the FastAPI surface of the harness
"""
import json

import pytest
from fastapi.testclient import TestClient

from hwmlab.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


def test_subcommands(client):
    names = client.get("/api/subcommands").json()["subcommands"]
    assert names == ["identities", "operators", "inequalities", "simulate", "gronwall", "strichartz"]


def test_unknown_subcommand(client):
    assert client.post("/api/run/transcribe").status_code == 404


def test_invalid_dimension(client):
    response = client.post("/api/run/identities", json={"dim": 9})
    assert response.status_code == 400
    assert "dim" in response.json()["detail"]


def test_extra_key_rejected(client):
    assert client.post("/api/run/identities", json={"grid_size": 64}).status_code == 422


def test_identities_run(client, tmp_path):
    response = client.post("/api/run/identities", json={"n": 64, "samples": 1, "output_dir": str(tmp_path)})
    assert response.status_code == 200
    body = response.json()
    assert body["pass"] is True
    assert body["subcommand"] == "identities"
    assert json.loads((tmp_path / "report.json").read_text())["pass"] is True

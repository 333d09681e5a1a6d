import json

import pytest
from fastapi.testclient import TestClient

from causetext import fixtures
from causetext.service import ServiceConfig, create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(ServiceConfig(data_dir=tmp_path / "data"))
    with TestClient(app) as c:
        yield c


@pytest.fixture
def climate_doc():
    return json.loads(fixtures.climate_graph_path().read_text(encoding="utf-8"))


@pytest.fixture
def climate_session(client, climate_doc):
    version = client.put("/graphs", json=climate_doc).json()["version"]
    selection = json.loads(fixtures.climate_selection_path().read_text(encoding="utf-8"))
    resp = client.post(
        "/sessions",
        json={
            "graph_version": version,
            "interventions": selection["interventions"],
            "objectives": selection["objectives"],
        },
    )
    assert resp.status_code == 200
    return resp.json()["id"], version


CHAIN_DOC = {
    "nodes": [
        {"id": "a", "label": "Alpha"},
        {"id": "b", "label": "Beta"},
        {"id": "c", "label": "Gamma"},
    ],
    "edges": [
        {"source": "a", "target": "b", "weight": 0.5},
        {"source": "b", "target": "c", "weight": 0.5},
    ],
}


def test_put_get_roundtrip(client):
    version = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    fetched = client.get(f"/graphs/{version}").json()
    assert fetched == CHAIN_DOC


def test_put_is_content_addressed(client):
    v1 = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    v2 = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    assert v1 == v2


def test_cyclic_graph_422_lists_cycle(client):
    doc = {
        "nodes": [{"id": n, "label": n.upper()} for n in "abc"],
        "edges": [
            {"source": "a", "target": "b", "weight": 0.5},
            {"source": "b", "target": "c", "weight": 0.5},
            {"source": "c", "target": "a", "weight": 0.5},
        ],
    }
    resp = client.put("/graphs", json=doc)
    assert resp.status_code == 422
    assert set(resp.json()["detail"]["cycle"]) == {"a", "b", "c"}


def test_duplicate_node_400_names_id(client):
    doc = {
        "nodes": [{"id": "a", "label": "A"}, {"id": "a", "label": "A2"}],
        "edges": [],
    }
    resp = client.put("/graphs", json=doc)
    assert resp.status_code == 400
    assert "a" in json.dumps(resp.json())


def test_unknown_field_400_with_location(client):
    doc = {"nodes": [{"id": "a", "label": "A", "speed": 2}], "edges": []}
    resp = client.put("/graphs", json=doc)
    assert resp.status_code == 400
    assert "nodes[0]" in resp.json()["detail"]


def test_missing_graph_404(client):
    assert client.get("/graphs/deadbeef").status_code == 404
    resp = client.post("/sessions", json={"graph_version": "deadbeef"})
    assert resp.status_code == 404


def test_session_requires_selections_409(client):
    version = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    sid = client.post("/sessions", json={"graph_version": version}).json()["id"]
    resp = client.get(f"/sessions/{sid}/narrative")
    assert resp.status_code == 409
    assert "select" in resp.json()["detail"]


def test_patch_updates_and_bumps_version(client):
    version = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    sid = client.post("/sessions", json={"graph_version": version}).json()["id"]
    resp = client.patch(
        f"/sessions/{sid}",
        json={
            "interventions": [{"node": "a", "delta": 20}],
            "objectives": ["c"],
            "budget": 500,
        },
    )
    assert resp.status_code == 200
    assert resp.json()["version"] == 1
    narrative = client.get(f"/sessions/{sid}/narrative")
    assert narrative.status_code == 200
    assert narrative.json()["session_version"] == 1


def test_patch_rejects_bad_selection(client):
    version = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    sid = client.post("/sessions", json={"graph_version": version}).json()["id"]
    resp = client.patch(
        f"/sessions/{sid}", json={"interventions": [{"node": "zz", "delta": 5}]}
    )
    assert resp.status_code == 400
    assert "unknown node" in resp.json()["detail"]


def test_patch_cannot_change_seed(client):
    version = client.put("/graphs", json=CHAIN_DOC).json()["version"]
    sid = client.post("/sessions", json={"graph_version": version}).json()["id"]
    resp = client.patch(f"/sessions/{sid}", json={"seed": 7})
    assert resp.status_code == 400


def test_narrative_repeated_gets_identical_bytes(climate_session, client):
    sid, _ = climate_session
    a = client.get(f"/sessions/{sid}/narrative", params={"format": "doc"})
    b = client.get(f"/sessions/{sid}/narrative", params={"format": "doc"})
    assert a.content == b.content
    assert a.status_code == 200


def test_narrative_full_payload(climate_session, client):
    sid, version = climate_session
    body = client.get(f"/sessions/{sid}/narrative").json()
    assert body["graph_version"] == version
    doc = body["doc"]
    assert doc["scope"] == "cumulative"
    assert doc["blocks"] and doc["spans"]
    assert set(body["net_changes"]) == {n["id"] for n in
                                        json.loads(fixtures.climate_graph_path().read_text())["nodes"]}
    enc = body["encodings"]
    assert enc["nodes"]["atmospheric-co2"]["polarity"] == "negative"
    assert enc["nodes"]["atmospheric-co2"]["shade"] >= enc["nodes"]["marine-quality"]["shade"]
    thick = {(e["source"], e["target"]): e["thickness"] for e in enc["edges"]}
    assert thick[("fossil-fuel", "atmospheric-co2")] == 3
    assert thick[("deforestation", "atmospheric-co2")] == 1
    assert body["interaction_index"]


def test_trace_endpoint(climate_session, client):
    sid, _ = climate_session
    body = client.get(f"/sessions/{sid}/trace").json()
    assert body["horizon"] == 12
    assert body["series"]["marine-quality"][0] == 0.0
    assert len(body["series"]["marine-quality"]) == 13


def test_search_endpoint(climate_session, client):
    sid, _ = climate_session
    body = client.get(f"/sessions/{sid}/search", params={"q": "Marine"}).json()
    assert body["hits"]
    assert all(isinstance(h, list) and len(h) == 2 for h in body["hits"])
    empty = client.get(f"/sessions/{sid}/search", params={"q": "zzzz"}).json()
    assert empty["hits"] == []


def test_narrative_is_side_effect_free(climate_session, client):
    sid, _ = climate_session
    before = client.get(f"/sessions/{sid}").json()
    client.get(f"/sessions/{sid}/narrative")
    client.get(f"/sessions/{sid}/narrative")
    after = client.get(f"/sessions/{sid}").json()
    assert before == after


def test_scope_patch_switches_phrasing(climate_session, client):
    sid, _ = climate_session
    cu = client.get(f"/sessions/{sid}/narrative").json()["doc"]
    client.patch(f"/sessions/{sid}", json={"scope": "instantaneous"})
    inst = client.get(f"/sessions/{sid}/narrative").json()["doc"]
    assert cu["scope"] == "cumulative" and inst["scope"] == "instantaneous"
    assert cu["blocks"] != inst["blocks"]
    assert "at T" in json.dumps(inst["blocks"])


def test_config_env_overrides(tmp_path, monkeypatch):
    cfg_file = tmp_path / "config.json"
    cfg_file.write_text(json.dumps({"port": 9100, "data_dir": str(tmp_path / "d1")}))
    cfg = ServiceConfig.load(cfg_file, env={})
    assert cfg.port == 9100
    cfg = ServiceConfig.load(cfg_file, env={"PORT": "9200", "DATA_DIR": str(tmp_path / "d2"),
                                            "WIKI_MODE": "live"})
    assert cfg.port == 9200
    assert cfg.data_dir == tmp_path / "d2"
    assert cfg.wiki_mode == "live"

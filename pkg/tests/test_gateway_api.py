import json

import pytest
from fastapi.testclient import TestClient

from dataspace import Dataspace, ns
from dataspace.gateway.api import create_app

from . import helpers
from .conftest import make_clock, tensile_eval_app


@pytest.fixture
def space():
    return Dataspace(clock=make_clock()).seed()


@pytest.fixture
def client(space):
    return TestClient(create_app(space=space))


def test_health(client):
    doc = client.get("/health").json()
    assert doc["ktypes"] == 5
    assert doc["kitems"] == 0
    assert doc["triples"] > 0


def test_ktype_routes(client):
    created = client.post("/ktypes", json={"id": "sample", "name": "Sample"})
    assert created.status_code == 201
    listed = client.get("/ktypes").json()
    assert "sample" in {k["id"] for k in listed}
    dup = client.post("/ktypes", json={"id": "sample"})
    assert dup.status_code == 400
    assert dup.json()["code"] == "kitem-error"


def test_kitem_crud(client):
    created = client.post(
        "/kitems",
        json={"ktype": "dataset", "name": "test one", "summary": "s", "id": "d1"},
    )
    assert created.status_code == 201
    assert created.json()["id"] == "d1"

    got = client.get("/kitems/d1").json()
    assert got["name"] == "test one"
    assert got["attachments"] == []

    patched = client.patch("/kitems/d1", json={"summary": "revised"})
    assert patched.json()["summary"] == "revised"

    missing = client.get("/kitems/ghost")
    assert missing.status_code == 404
    assert missing.json()["code"] == "kitem-error"

    assert client.get("/kitems").json()[0]["id"] == "d1"


def test_links_and_annotations(client, space):
    client.post("/kitems", json={"ktype": "dataset", "name": "a", "id": "a"})
    client.post("/kitems", json={"ktype": "dataset", "name": "b", "id": "b"})
    link = client.post("/kitems/a/links", json={"target": "b", "label": "related"})
    assert link.status_code == 201
    assert link.json()["target"] == "b"

    bad = client.post("/kitems/a/annotations", json={"iri": ns.STEEL + "TensileTest"})
    assert bad.status_code == 400  # concept not registered
    client.post(
        "/vocabulary/terms", json={"namespace": ns.STEEL, "label": "TensileTest"}
    )
    ok = client.post("/kitems/a/annotations", json={"iri": ns.STEEL + "TensileTest"})
    assert ok.json()["annotations"] == [ns.STEEL + "TensileTest"]


def test_attachment_round_trip(client):
    client.post("/kitems", json={"ktype": "dataset", "name": "d", "id": "d"})
    up = client.post(
        "/kitems/d/attachments?filename=raw.csv",
        content=b"1,2,3",
        headers={"content-type": "text/csv"},
    )
    assert up.status_code == 201
    assert len(up.json()["checksum"]) == 64

    down = client.get("/kitems/d/attachments/raw.csv")
    assert down.content == b"1,2,3"
    assert down.headers["content-type"].startswith("text/csv")

    no_name = client.post("/kitems/d/attachments", content=b"x")
    assert no_name.status_code == 400


def test_ingest_and_graph_and_level(client, space):
    client.post(
        "/vocabulary/terms", json={"namespace": ns.STEEL, "label": "TensileTest"}
    )
    client.post("/kitems", json={"ktype": "dataset", "name": "AFZ1-Fz-S1D", "id": "ds1"})
    client.post(
        "/kitems/ds1/attachments?filename=fig7.csv",
        content=helpers.fig7_bytes(),
        headers={"content-type": "text/csv"},
    )
    report = client.post("/kitems/ds1/ingest", json={
        "filename": "fig7.csv",
        "mapping": helpers.fig7_mapping().decode("utf-8"),
        "config": helpers.fig7_config(),
    })
    assert report.status_code == 200, report.text
    doc = report.json()
    assert doc["level"] == 4
    assert doc["metadata_count"] == 19
    assert doc["columns"] == ["Standardweg", "Standardkraft"]

    turtle = client.get("/kitems/ds1/graph")
    assert turtle.headers["content-type"].startswith("text/turtle")
    assert "DX56D" in turtle.text

    assert client.get("/kitems/ds1/level").json() == {"level": 4}

    column = client.get("/kitems/ds1/columns/Standardweg").json()
    assert len(column["values"]) == 99
    missing = client.get("/kitems/ds1/columns/nope")
    assert missing.status_code == 400


def test_linkgraph(client):
    for i in ("a", "b", "c"):
        client.post("/kitems", json={"ktype": "dataset", "name": i, "id": i})
    client.post("/kitems/a/links", json={"target": "b"})
    client.post("/kitems/b/links", json={"target": "c"})
    deep = client.get("/kitems/a/linkgraph?depth=2").json()
    assert [n["id"] for n in deep["nodes"]] == ["a", "b", "c"]
    shallow = client.get("/kitems/a/linkgraph?depth=1").json()
    assert [n["id"] for n in shallow["nodes"]] == ["a", "b"]


def test_search_routes(client):
    client.post("/kitems", json={"ktype": "dataset", "name": "tensile alpha", "id": "t1"})
    client.post("/kitems", json={"ktype": "material", "name": "copper beta", "id": "m1"})
    hits = client.get("/search", params={"q": "tensile"}).json()
    assert [h["id"] for h in hits] == ["t1"]
    assert hits[0]["ktype"] == "dataset"

    by_ktype = client.get("/search", params={"ktype": "material,dataset"}).json()
    assert {h["id"] for h in by_ktype} == {"t1", "m1"}

    empty = client.get("/search")
    assert empty.status_code == 400


def test_sparql_both_content_types(client):
    client.post("/kitems", json={"ktype": "dataset", "name": "alpha", "id": "d1"})
    query = (
        "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
        "SELECT ?name WHERE { <dsms://kitem/d1> rdfs:label ?name }"
    )
    raw = client.post(
        "/sparql", content=query, headers={"content-type": "application/sparql-query"}
    )
    assert raw.headers["content-type"].startswith("application/sparql-results+json")
    doc = raw.json()
    assert doc["head"]["vars"] == ["name"]
    assert doc["results"]["bindings"][0]["name"]["value"] == "alpha"

    wrapped = client.post("/sparql", json={"query": query})
    assert wrapped.json() == doc

    bad = client.post(
        "/sparql", content="NOT SPARQL",
        headers={"content-type": "application/sparql-query"},
    )
    assert bad.status_code == 400
    assert bad.json()["code"] == "query-error"


def test_vocabulary_routes(client):
    client.post("/vocabulary/terms", json={
        "namespace": ns.STEEL, "label": "BrinellHardness",
        "description": "indentation hardness",
    })
    terms = client.get("/vocabulary/terms").json()
    assert any(t["label"] == "BrinellHardness" for t in terms)
    found = client.get("/vocabulary/search", params={"q": "indentation"}).json()
    assert [t["label"] for t in found] == ["BrinellHardness"]


def test_form_routes(client):
    client.post("/vocabulary/terms", json={"namespace": ns.STEEL, "label": "Facility"})
    created = client.post("/ktypes/dataset/form", json={
        "fields": [{"key": "facility", "label": "Facility",
                    "concept": ns.STEEL + "Facility", "kind": "text"}],
    })
    assert created.status_code == 201
    assert created.json()["version"] == 1
    assert client.get("/ktypes/dataset/form").json()["version"] == 1

    client.post("/kitems", json={"ktype": "dataset", "name": "d", "id": "d"})
    submitted = client.post("/kitems/d/forms/dataset/submit", json={"facility": "IWM"})
    assert submitted.json()["form_version"] == 1
    assert submitted.json()["triples_written"] > 0

    invalid = client.post("/kitems/d/forms/dataset/submit", json={"bogus": 1})
    assert invalid.status_code == 400
    assert invalid.json()["code"] == "form-error"


def test_app_routes_and_upload_trigger(client, space):
    client.post("/vocabulary/terms", json={"namespace": ns.STEEL, "label": "TensileTest"})
    registered = client.post("/apps", json=tensile_eval_app().to_dict())
    assert registered.status_code == 201
    assert [a["id"] for a in client.get("/apps").json()] == ["tensile-eval"]

    client.post("/kitems", json={"ktype": "dataset", "name": "AFZ1-Fz-S1D", "id": "ds1"})
    client.post(
        "/kitems/ds1/attachments?filename=fig7.csv",
        content=helpers.fig7_bytes(),
        headers={"content-type": "text/csv"},
    )
    client.post("/kitems/ds1/ingest", json={
        "filename": "fig7.csv",
        "mapping": helpers.fig7_mapping().decode("utf-8"),
        "config": helpers.fig7_config(),
    })
    # annotation arrived during ingest; a fresh upload of the same data
    # under a new name now matches the trigger and is drained inline
    client.post(
        "/kitems/ds1/attachments?filename=fig7-again.csv",
        content=helpers.fig7_bytes(),
        headers={"content-type": "text/csv"},
    )
    run = client.get("/runs/run-0001")
    assert run.status_code == 200
    record = run.json()
    assert record["status"] == "succeeded", record["log"]
    assert record["outputs"] == ["run-0001-card"]

    explicit = client.post("/apps/tensile-eval/run", json={"inputs": ["ds1"]})
    assert explicit.status_code == 202
    assert explicit.json()["run_id"] == "run-0002"

    exported = client.post("/kitems/run-0001-card/export",
                           json={"template": "hs-analytic"})
    assert exported.json() == {"filename": "hs-analytic.key"}
    key = client.get("/kitems/run-0001-card/attachments/hs-analytic.key")
    assert b"*HOCKETT_SHERBY" in key.content

    assert client.get("/runs/run-9999").status_code == 400


def test_connector_routes(client, tmp_path):
    added = client.post("/connectors", json={
        "id": "repo", "endpoint": str(tmp_path / "catalog.json"),
    })
    assert added.status_code == 201
    assert [c["id"] for c in client.get("/connectors").json()] == ["repo"]

    catalog = json.dumps({"result": {"results": [
        {"id": "e1", "title": "External one"},
    ]}})
    # catalog in the request body
    report = client.post("/connectors/repo/sync", json={"catalog": catalog}).json()
    assert report == {"created": 1, "updated": 0, "unchanged": 0, "failures": []}

    # catalog fetched from the endpoint (a local file here)
    (tmp_path / "catalog.json").write_text(catalog)
    report = client.post("/connectors/repo/sync", json={}).json()
    assert report["unchanged"] == 1

    bad = client.post("/connectors/repo/sync", json={"catalog": "{broken"})
    assert bad.status_code == 400
    assert bad.json()["code"] == "connector-error"


def test_token_guard(space):
    client = TestClient(create_app(space=space, token="sesame"))
    assert client.get("/health").status_code == 200  # reads stay open
    denied = client.post("/kitems", json={"ktype": "dataset", "name": "x"})
    assert denied.status_code == 401
    assert denied.json()["code"] == "unauthorized"
    allowed = client.post(
        "/kitems",
        json={"ktype": "dataset", "name": "x", "id": "x"},
        headers={"authorization": "Bearer sesame"},
    )
    assert allowed.status_code == 201


def test_persistence_hook(space, tmp_path):
    client = TestClient(create_app(space=space, data_dir=tmp_path / "state"))
    client.post("/kitems", json={"ktype": "dataset", "name": "kept", "id": "kept"})
    reloaded = Dataspace.load(tmp_path / "state")
    assert reloaded.kitems.get("kept").name == "kept"

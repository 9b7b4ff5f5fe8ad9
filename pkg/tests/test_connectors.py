import json

import pytest

from dataspace import ns
from dataspace.connectors import ConnectorError, ConnectorSpec, parse_catalog
from dataspace.rdf import Literal, Triple, string_literal

from . import helpers


def catalog(*titles, with_resources=True):
    datasets = []
    for i, title in enumerate(titles, start=1):
        datasets.append({
            "id": f"ext-{i}",
            "title": title,
            "notes": f"notes for {title}",
            "resources": (
                [{"url": f"https://repo.example.org/ext-{i}.csv", "format": "CSV"}]
                if with_resources else []
            ),
            "tags": [{"name": "hardness"}],
        })
    return json.dumps({"result": {"results": datasets}}).encode("utf-8")


def test_parse_catalog_shape():
    datasets = parse_catalog(catalog("Alpha", "Beta"))
    assert [d.external_id for d in datasets] == ["ext-1", "ext-2"]
    assert datasets[0].title == "Alpha"
    assert datasets[0].description == "notes for Alpha"
    assert datasets[0].resources == [("https://repo.example.org/ext-1.csv", "CSV")]
    assert datasets[0].tags == ["hardness"]


def test_parse_catalog_errors():
    with pytest.raises(ConnectorError, match="malformed"):
        parse_catalog(b"{not json")
    with pytest.raises(ConnectorError, match="result.results"):
        parse_catalog(b'{"result": {}}')
    with pytest.raises(ConnectorError, match="lacks an id"):
        parse_catalog(json.dumps({"result": {"results": [{"title": "x"}]}}).encode())


def test_add_validates(space):
    space.connectors.add(ConnectorSpec("repo", "https://repo.example.org"))
    with pytest.raises(ConnectorError):
        space.connectors.add(ConnectorSpec("repo", "elsewhere"))
    with pytest.raises(Exception):
        space.connectors.add(ConnectorSpec("bad", "x", ktype="no-such-ktype"))
    with pytest.raises(ConnectorError):
        space.connectors.get("missing")


def test_sync_creates_reference_items(space):
    space.connectors.add(ConnectorSpec("repo", "https://repo.example.org"))
    report = space.connectors.sync("repo", catalog("Alpha", "Beta"))
    assert (report.created, report.updated, report.unchanged) == (2, 0, 0)
    assert report.failures == []

    item = space.kitems.get("repo-ext-1")
    assert item.name == "Alpha"
    assert item.summary == "notes for Alpha"
    assert [a.value for a in item.annotations] == [ns.DSMS_EXTERNAL_REFERENCE.value]
    # reference items never carry the data itself
    assert item.attachments == {}

    graph = space.store.graph(item.graph_iri)
    values = {
        t.object.lexical
        for t in graph
        if t.predicate == ns.DSMS_VALUE and isinstance(t.object, Literal)
    }
    assert "ext-1" in values
    assert "https://repo.example.org/ext-1.csv" in values


def test_second_sync_is_all_unchanged(space):
    space.connectors.add(ConnectorSpec("repo", "https://repo.example.org"))
    space.connectors.sync("repo", catalog("Alpha", "Beta"))
    report = space.connectors.sync("repo", catalog("Alpha", "Beta"))
    assert (report.created, report.updated, report.unchanged) == (0, 0, 2)


def test_sync_updates_changed_titles(space):
    space.connectors.add(ConnectorSpec("repo", "https://repo.example.org"))
    space.connectors.sync("repo", catalog("Alpha"))
    report = space.connectors.sync("repo", catalog("Alpha (revised)"))
    assert (report.created, report.updated, report.unchanged) == (0, 1, 0)
    item = space.kitems.get("repo-ext-1")
    assert item.name == "Alpha (revised)"
    graph = space.store.graph(item.graph_iri)
    assert Triple(item.iri, ns.RDFS_LABEL, string_literal("Alpha (revised)")) in graph
    assert Triple(item.iri, ns.RDFS_LABEL, string_literal("Alpha")) not in graph


def test_sync_collects_per_dataset_failures(space):
    space.connectors.add(ConnectorSpec("repo", "https://repo.example.org"))
    # occupy the id the connector would mint for ext-1
    space.kitems.create_kitem("dataset", "squatter", item_id="repo-ext-1")
    report = space.connectors.sync("repo", catalog("Alpha", "Beta"))
    assert report.created == 1
    assert len(report.failures) == 1 and report.failures[0].startswith("ext-1:")
    # the good dataset still made it
    assert space.kitems.get("repo-ext-2").name == "Beta"


def test_sync_with_generated_corpus_catalog(space):
    datasets = helpers.kupfer_corpus()
    space.connectors.add(ConnectorSpec("kupfer", "https://kupfer.example.org"))
    report = space.connectors.sync("kupfer", helpers.ckan_catalog(datasets))
    assert report.created == 30
    again = space.connectors.sync("kupfer", helpers.ckan_catalog(datasets))
    assert (again.created, again.updated, again.unchanged) == (0, 0, 30)
    total_bytes = sum(
        len(a.data)
        for item in space.kitems.items.values()
        for a in item.attachments.values()
    )
    assert total_bytes == 0


def test_spec_round_trip():
    spec = ConnectorSpec("repo", "https://x", ktype="dataset", poll_interval=60)
    assert ConnectorSpec.from_dict(spec.to_dict()) == spec

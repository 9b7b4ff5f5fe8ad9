"""Catalog connectors: poll an external repository's package listing and
maintain reference k-items, never copying the data itself."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import ns
from .ingest import MetadataRecord, build_flat_graph
from .kitems import KItemStore
from .rdf import Triple, string_literal


class ConnectorError(ValueError):
    pass


@dataclass
class ConnectorSpec:
    id: str
    endpoint: str  # URL or local fixture path
    ktype: str = "dataset"
    poll_interval: int = 0  # seconds, 0 = manual

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "endpoint": self.endpoint,
            "ktype": self.ktype,
            "poll_interval": self.poll_interval,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ConnectorSpec":
        return cls(
            id=doc["id"],
            endpoint=doc["endpoint"],
            ktype=doc.get("ktype", "dataset"),
            poll_interval=int(doc.get("poll_interval", 0)),
        )


@dataclass
class ExternalDataset:
    external_id: str
    title: str
    description: str = ""
    resources: list[tuple[str, str]] = field(default_factory=list)  # (url, format)
    tags: list[str] = field(default_factory=list)


@dataclass
class SyncReport:
    created: int = 0
    updated: int = 0
    unchanged: int = 0
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "created": self.created,
            "updated": self.updated,
            "unchanged": self.unchanged,
            "failures": list(self.failures),
        }


def parse_catalog(data: bytes) -> list[ExternalDataset]:
    """CKAN package_search shape: result.results[] with id/title/notes/
    resources/tags."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConnectorError(f"malformed catalog JSON: {exc}") from None
    try:
        results = doc["result"]["results"]
    except (TypeError, KeyError):
        raise ConnectorError("catalog lacks result.results") from None
    datasets = []
    for entry in results:
        if "id" not in entry:
            raise ConnectorError("catalog entry lacks an id")
        datasets.append(
            ExternalDataset(
                external_id=entry["id"],
                title=entry.get("title", entry["id"]),
                description=entry.get("notes", "") or "",
                resources=[
                    (r.get("url", ""), r.get("format", ""))
                    for r in entry.get("resources", [])
                ],
                tags=[t.get("name", "") for t in entry.get("tags", [])],
            )
        )
    return datasets


class ConnectorRegistry:
    def __init__(self, kitems: KItemStore):
        self.kitems = kitems
        self.connectors: dict[str, ConnectorSpec] = {}
        # connector id -> external id -> k-item id
        self.seen: dict[str, dict[str, str]] = {}

    def add(self, spec: ConnectorSpec) -> ConnectorSpec:
        if spec.id in self.connectors:
            raise ConnectorError(f"connector id {spec.id!r} already registered")
        self.kitems.get_ktype(spec.ktype)
        self.connectors[spec.id] = spec
        self.seen.setdefault(spec.id, {})
        return spec

    def get(self, connector_id: str) -> ConnectorSpec:
        try:
            return self.connectors[connector_id]
        except KeyError:
            raise ConnectorError(f"unknown connector {connector_id!r}") from None

    def sync(self, connector_id: str, catalog: bytes) -> SyncReport:
        """Upsert reference k-items by external id. No resource bytes are
        ever downloaded or attached."""
        spec = self.get(connector_id)
        datasets = parse_catalog(catalog)
        known = self.seen.setdefault(connector_id, {})
        report = SyncReport()
        for dataset in datasets:
            try:
                if dataset.external_id in known:
                    item = self.kitems.get(known[dataset.external_id])
                    if item.name == dataset.title and item.summary == dataset.description:
                        report.unchanged += 1
                    else:
                        item.name = dataset.title
                        item.summary = dataset.description
                        self._rewrite_labels(item)
                        self.kitems._changed(item)
                        report.updated += 1
                    continue
                item = self.kitems.create_kitem(
                    spec.ktype,
                    dataset.title,
                    dataset.description,
                    item_id=f"{connector_id}-{dataset.external_id}",
                )
                self.kitems.annotate(item.id, ns.DSMS_EXTERNAL_REFERENCE)
                records = [
                    MetadataRecord(
                        key="external-id",
                        concept=ns.DSMS_EXTERNAL_ID,
                        value=dataset.external_id,
                        lexical=dataset.external_id,
                        datatype=None,
                    )
                ]
                for url, _ in dataset.resources:
                    if url:
                        records.append(
                            MetadataRecord(
                                key="resource-url",
                                concept=ns.DSMS_RESOURCE_URL,
                                value=url,
                                lexical=url,
                                datatype=None,
                            )
                        )
                triples, _ = build_flat_graph(
                    item.iri, item.id, records, [], self.kitems.store.allocator
                )
                self.kitems.store.insert(item.graph_iri, triples)
                self.kitems._changed(item)
                known[dataset.external_id] = item.id
                report.created += 1
            except Exception as exc:  # noqa: BLE001 - per-dataset failures collected
                report.failures.append(f"{dataset.external_id}: {exc}")
        return report

    def _rewrite_labels(self, item):
        graph = self.kitems.store.graph(item.graph_iri)
        stale = [
            t
            for t in graph
            if t.subject == item.iri
            and t.predicate in (ns.RDFS_LABEL, ns.DCTERMS_DESCRIPTION)
        ]
        self.kitems.store.remove(item.graph_iri, stale)
        self.kitems.store.insert(
            item.graph_iri,
            [
                Triple(item.iri, ns.RDFS_LABEL, string_literal(item.name)),
                Triple(item.iri, ns.DCTERMS_DESCRIPTION, string_literal(item.summary)),
            ],
        )

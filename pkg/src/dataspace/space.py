"""Dataspace facade: wires the store, vocabulary, k-items, search, forms,
provenance, apps and connectors together and persists the whole state to a
directory tree."""

from __future__ import annotations

import json
from pathlib import Path

from . import ns
from .apps import AppRegistry, AppSpec, RunRecord
from .cards import card_export_operation, tensile_eval_operation
from .connectors import ConnectorRegistry, ConnectorSpec
from .container import read_container, write_container
from .forms import FormRegistry, FormSchema
from .ingest import IngestConfig, MappingFile, ingest_file, parse_mapping
from .kitems import Attachment, KItemStore, Link
from .provenance import ProvenanceLog
from .rdf import Iri, QuadStore, run_sparql_json
from .search import SearchIndex, wire_index
from .units import DEFAULT_UNITS
from .vocabulary import VocabularyRegistry


class Dataspace:
    def __init__(self, store: QuadStore | None = None, clock=None):
        self.store = store or QuadStore(ns.PREFIXES)
        self.vocabulary = VocabularyRegistry(self.store)
        self.kitems = KItemStore(self.store, self.vocabulary, clock=clock)
        self.search = SearchIndex(self.vocabulary)
        wire_index(self.search, self.kitems)
        self.provenance = ProvenanceLog(self.store)
        self.apps = AppRegistry(self.kitems, self.provenance, clock=self.kitems._clock)
        self.forms = FormRegistry(self.vocabulary)
        self.connectors = ConnectorRegistry(self.kitems)
        self.units = DEFAULT_UNITS
        self._register_builtin_operations()

    def _register_builtin_operations(self):
        self.apps.register_operation("tensile-eval", tensile_eval_operation(self.units))
        self.apps.register_operation("card-export", card_export_operation(self.provenance))

    # convenience -----------------------------------------------------
    def seed(self):
        """Baseline k-types and vocabulary every dataspace needs."""
        for ktype_id, name in (
            ("dataset", "Dataset"),
            ("material", "Material"),
            ("organization", "Organization"),
            ("testing-machine", "Testing machine"),
            ("material-card", "Material card"),
        ):
            if ktype_id not in self.kitems.ktypes:
                self.kitems.add_ktype(ktype_id, name)
        if not self.vocabulary.has(ns.DSMS_EXTERNAL_REFERENCE):
            self.vocabulary.register_term(
                ns.DSMS, "ExternalReference",
                description="K-item referring to a dataset held in an external repository",
            )
        return self

    def sparql(self, query_text: str) -> dict:
        return run_sparql_json(self.store, query_text)

    def ingest(
        self,
        item_id: str,
        filename: str,
        mapping: MappingFile | bytes,
        config: IngestConfig | dict,
        mapping_format: str = "structured",
    ):
        if isinstance(mapping, (bytes, bytearray)):
            mapping = parse_mapping(bytes(mapping), mapping_format)
        if isinstance(config, dict):
            config = IngestConfig.from_dict(config)
        return ingest_file(
            self.kitems,
            item_id,
            filename,
            mapping,
            config,
            unit_table=self.units,
            on_ingested=self._record_ingest_provenance,
        )

    def _record_ingest_provenance(self, item, filename, derived_name):
        activity = Iri(f"dsms://activity/ingest/{item.id}/{filename}")
        graph = self.provenance.graph()
        if any(t.subject == activity for t in graph):
            return  # re-ingest of the same file keeps the original activity
        self.provenance.record_activity(
            activity,
            used=[ns.file_entity_iri(item.id, filename)],
            generated=[ns.file_entity_iri(item.id, derived_name)],
            label=f"ingest {filename}",
        )

    # persistence -------------------------------------------------------
    def save(self, directory: Path):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.store.save(directory / "graphs")

        items_doc = {}
        for item in self.kitems.items.values():
            item_dir = directory / "files" / item.id
            attachments = {}
            for name, attachment in item.attachments.items():
                item_dir.mkdir(parents=True, exist_ok=True)
                (item_dir / name).write_bytes(attachment.data)
                attachments[name] = {
                    "media_type": attachment.media_type,
                    "derived": attachment.derived,
                    "checksum": attachment.checksum,
                }
            container_file = None
            if item.container is not None:
                (directory / "containers").mkdir(parents=True, exist_ok=True)
                container_file = f"{item.id}.kdc"
                (directory / "containers" / container_file).write_bytes(
                    write_container(item.container)
                )
            items_doc[item.id] = {
                "ktype": item.ktype,
                "name": item.name,
                "summary": item.summary,
                "annotations": [a.value for a in item.annotations],
                "links": [
                    {"target": l.target, "relation": l.relation.value, "label": l.label}
                    for l in item.links
                ],
                "attachments": attachments,
                "container": container_file,
                "created": item.created,
                "updated": item.updated,
                "unmapped_keys": list(item.unmapped_keys),
            }

        state = {
            "ktypes": {
                k.id: {"name": k.name, "description": k.description}
                for k in self.kitems.ktypes.values()
            },
            "items": items_doc,
            "apps": [a.to_dict() for a in self.apps.apps.values()],
            "runs": [r.to_dict() for r in self.apps.runs.values()],
            "run_counter": self.apps._run_counter,
            "dispatched": sorted(list(e) for e in self.apps._dispatched),
            "connectors": [c.to_dict() for c in self.connectors.connectors.values()],
            "connector_seen": self.connectors.seen,
            "forms": {k: s.to_dict() for k, s in self.forms.schemas.items()},
            "vocabulary": [
                {
                    "namespace": t.namespace,
                    "label": t.label,
                    "parent": t.parent.value if t.parent else None,
                    "description": t.description,
                }
                for t in self.vocabulary.all_terms()
            ],
        }
        (directory / "state.json").write_text(
            json.dumps(state, indent=2, sort_keys=True, ensure_ascii=False),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, directory: Path, clock=None) -> "Dataspace":
        directory = Path(directory)
        store = QuadStore.load(directory / "graphs")
        # the vocabulary graph is rebuilt from state, not from the store copy
        store.drop_graph(ns.VOCABULARY_GRAPH)
        space = cls(store=store, clock=clock)
        state = json.loads((directory / "state.json").read_text(encoding="utf-8"))

        pending = list(state["vocabulary"])
        while pending:
            deferred = []
            progressed = False
            for doc in pending:
                if doc["parent"] and not space.vocabulary.has(doc["parent"]):
                    deferred.append(doc)
                    continue
                space.vocabulary.register_term(
                    doc["namespace"], doc["label"], doc["parent"], doc["description"]
                )
                progressed = True
            if not progressed and deferred:
                raise ValueError("vocabulary state has unresolvable parents")
            pending = deferred

        for ktype_id, doc in state["ktypes"].items():
            space.kitems.add_ktype(ktype_id, doc["name"], doc["description"])

        from .kitems import KItem

        for item_id, doc in state["items"].items():
            item = KItem(
                id=item_id,
                ktype=doc["ktype"],
                name=doc["name"],
                summary=doc["summary"],
                annotations=[Iri(a) for a in doc["annotations"]],
                links=[
                    Link(l["target"], Iri(l["relation"]), l.get("label"))
                    for l in doc["links"]
                ],
                created=doc["created"],
                updated=doc["updated"],
                unmapped_keys=list(doc.get("unmapped_keys", [])),
            )
            for name, meta in doc["attachments"].items():
                data = (directory / "files" / item_id / name).read_bytes()
                item.attachments[name] = Attachment(
                    name, meta["media_type"], data, meta["checksum"], meta["derived"]
                )
            if doc["container"]:
                item.container = read_container(
                    (directory / "containers" / doc["container"]).read_bytes()
                )
            space.kitems.items[item_id] = item

        for doc in state["apps"]:
            space.apps.register_app(AppSpec.from_dict(doc))
        for doc in state["runs"]:
            record = RunRecord(**doc)
            space.apps.runs[record.run_id] = record
        space.apps._run_counter = state["run_counter"]
        space.apps._dispatched = {tuple(e) for e in state["dispatched"]}
        for doc in state["connectors"]:
            space.connectors.add(ConnectorSpec.from_dict(doc))
        space.connectors.seen = {
            k: dict(v) for k, v in state["connector_seen"].items()
        }
        for ktype_id, doc in state["forms"].items():
            space.forms.schemas[ktype_id] = FormSchema.from_dict(doc)

        for item in space.kitems.items.values():
            for fn in space.kitems.on_change:
                fn(item)
        return space

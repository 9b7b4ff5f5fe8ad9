"""K-types and k-items: metadata + data container + per-item semantic graph,
linkage, annotations, attachments and integration-level classification."""

from __future__ import annotations

import hashlib
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import ns
from .container import ColumnContainer
from .rdf import Iri, QuadStore, Triple, double_literal, integer_literal, string_literal
from .vocabulary import VocabularyRegistry

LEVEL_NONE = "none"


class KItemError(ValueError):
    pass


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass
class KType:
    id: str
    name: str
    description: str = ""
    form_schema: str | None = None


@dataclass(frozen=True)
class Link:
    target: str
    relation: Iri = ns.DSMS_IS_RELATED_TO
    label: str | None = None


@dataclass
class Attachment:
    filename: str
    media_type: str
    data: bytes
    checksum: str = ""
    derived: bool = False

    def __post_init__(self):
        digest = hashlib.sha256(self.data).hexdigest()
        if self.checksum and self.checksum != digest:
            raise KItemError(f"checksum mismatch for {self.filename!r}")
        self.checksum = digest


@dataclass
class KItem:
    id: str
    ktype: str
    name: str
    summary: str = ""
    annotations: list[Iri] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)
    attachments: dict[str, Attachment] = field(default_factory=dict)
    container: ColumnContainer | None = None
    created: str = ""
    updated: str = ""
    unmapped_keys: list[str] = field(default_factory=list)

    @property
    def graph_iri(self) -> str:
        return ns.kitem_graph_iri(self.id)

    @property
    def iri(self) -> Iri:
        return ns.kitem_iri(self.id)


def ktype_iri(ktype_id: str) -> Iri:
    return Iri(f"dsms://ktype/{ktype_id}")


class KItemStore:
    """In-memory registry of k-types and k-items backed by a QuadStore for
    the semantic graphs. Mutations notify registered listeners (search
    index, app triggers)."""

    def __init__(self, store: QuadStore, vocabulary: VocabularyRegistry, clock=None):
        self.store = store
        self.vocabulary = vocabulary
        self._clock = clock or _utcnow
        self.ktypes: dict[str, KType] = {}
        self.items: dict[str, KItem] = {}
        self.on_change: list = []   # fn(kitem)
        self.on_upload: list = []   # fn(kitem, filename)

    # listeners -----------------------------------------------------
    def _changed(self, item: KItem):
        item.updated = self._clock()
        for fn in self.on_change:
            fn(item)

    # k-types -------------------------------------------------------
    def add_ktype(self, ktype_id: str, name: str, description: str = "") -> KType:
        if ktype_id in self.ktypes:
            raise KItemError(f"k-type {ktype_id!r} already exists")
        kt = KType(ktype_id, name, description)
        self.ktypes[ktype_id] = kt
        return kt

    def get_ktype(self, ktype_id: str) -> KType:
        try:
            return self.ktypes[ktype_id]
        except KeyError:
            raise KItemError(f"unknown k-type {ktype_id!r}") from None

    def delete_ktype(self, ktype_id: str):
        self.get_ktype(ktype_id)
        if any(item.ktype == ktype_id for item in self.items.values()):
            raise KItemError(f"k-type {ktype_id!r} is referenced by k-items")
        del self.ktypes[ktype_id]

    # k-items -------------------------------------------------------
    def create_kitem(
        self, ktype_id: str, name: str, summary: str = "", item_id: str | None = None
    ) -> KItem:
        self.get_ktype(ktype_id)
        if not name:
            raise KItemError("k-item name must be non-empty")
        item_id = item_id or str(uuid.uuid4())
        if item_id in self.items:
            raise KItemError(f"k-item id {item_id!r} already exists")
        now = self._clock()
        item = KItem(item_id, ktype_id, name, summary, created=now, updated=now)
        self.items[item_id] = item
        self.store.insert(
            item.graph_iri,
            [
                Triple(item.iri, ns.A, ns.DSMS_KITEM),
                Triple(item.iri, ns.DSMS_KTYPE, ktype_iri(ktype_id)),
                Triple(item.iri, ns.RDFS_LABEL, string_literal(name)),
                Triple(item.iri, ns.DCTERMS_DESCRIPTION, string_literal(summary)),
            ],
        )
        self._changed(item)
        return item

    def get(self, item_id: str) -> KItem:
        try:
            return self.items[item_id]
        except KeyError:
            raise KItemError(f"unknown k-item {item_id!r}") from None

    def delete_kitem(self, item_id: str):
        item = self.get(item_id)
        self.store.drop_graph(item.graph_iri)
        if item.container:
            for column in item.container.columns:
                self.store.drop_graph(ns.expansion_graph_iri(item_id, column.name))
        for other in self.items.values():
            inbound = [ln for ln in other.links if ln.target == item_id]
            if inbound:
                other.links = [ln for ln in other.links if ln.target != item_id]
                self.store.remove(
                    other.graph_iri,
                    [Triple(other.iri, ln.relation, item.iri) for ln in inbound],
                )
                self._changed(other)
        del self.items[item_id]

    # linkage -------------------------------------------------------
    def link_kitems(
        self,
        source_id: str,
        target_id: str,
        relation: Iri | None = None,
        label: str | None = None,
    ) -> Link:
        source = self.get(source_id)
        target = self.get(target_id)
        if source_id == target_id:
            raise KItemError("self-links are not allowed")
        relation = relation or ns.DSMS_IS_RELATED_TO
        link = Link(target_id, relation, label)
        if any(l.target == target_id and l.relation == relation for l in source.links):
            raise KItemError(
                f"duplicate link {source_id} -> {target_id} ({relation.value})"
            )
        source.links.append(link)
        self.store.insert(source.graph_iri, [Triple(source.iri, relation, target.iri)])
        self._changed(source)
        return link

    def annotate(self, item_id: str, concept: Iri | str) -> KItem:
        item = self.get(item_id)
        concept = Iri(concept) if isinstance(concept, str) else concept
        if not self.vocabulary.has(concept):
            raise KItemError(f"annotation {concept.value} is not a registered concept")
        if concept not in item.annotations:
            item.annotations.append(concept)
            self.store.insert(
                item.graph_iri, [Triple(item.iri, ns.DSMS_HAS_ANNOTATION, concept)]
            )
            self._changed(item)
        return item

    def attach(
        self,
        item_id: str,
        filename: str,
        data: bytes,
        media_type: str = "application/octet-stream",
        derived: bool = False,
        replace: bool = False,
    ) -> Attachment:
        item = self.get(item_id)
        if filename in item.attachments and not replace:
            raise KItemError(f"attachment {filename!r} already exists on {item_id}")
        attachment = Attachment(filename, media_type, data, derived=derived)
        item.attachments[filename] = attachment
        self._changed(item)
        if not derived:
            for fn in self.on_upload:
                fn(item, filename)
        return attachment

    def get_attachment(self, item_id: str, filename: str) -> Attachment:
        item = self.get(item_id)
        try:
            return item.attachments[filename]
        except KeyError:
            raise KItemError(f"no attachment {filename!r} on {item_id}") from None

    def set_container(self, item_id: str, container: ColumnContainer | None):
        item = self.get(item_id)
        item.container = container
        self._changed(item)

    # integration levels ---------------------------------------------
    def integration_level(self, item_id: str):
        item = self.get(item_id)
        if not item.attachments:
            return LEVEL_NONE
        level = 0
        # L1: a file-type annotation (media-type concept)
        if not any(self.vocabulary.is_media_type(a) for a in item.annotations):
            return level
        level = 1
        # L2: a context annotation (registered concept that is not a media type)
        if not any(
            self.vocabulary.has(a) and not self.vocabulary.is_media_type(a)
            for a in item.annotations
        ):
            return level
        level = 2
        # L3: a metadata node typed by a vocabulary concept
        graph = self.store.graph(item.graph_iri)
        metadatum_nodes = {
            t.object for t in graph
            if t.predicate == ns.DSMS_HAS_METADATUM and t.subject == item.iri
        }
        typed = any(
            t.predicate == ns.A
            and t.subject in metadatum_nodes
            and isinstance(t.object, Iri)
            and self.vocabulary.has(t.object)
            for t in graph
        )
        if not typed:
            return level
        level = 3
        # L4: graph references container columns and all references resolve
        access_urls = [
            t.object.lexical
            for t in graph
            if t.predicate == ns.DSMS_ACCESS_URL and hasattr(t.object, "lexical")
        ]
        if item.container is None or not access_urls:
            return level
        for url in access_urls:
            prefix = f"container://{item.id}/"
            if not url.startswith(prefix) or not item.container.has_column(
                url[len(prefix):]
            ):
                return level
        level = 4
        # L5: every container column has a non-empty per-point expansion graph
        for column in item.container.columns:
            expansion = self.store.graph(ns.expansion_graph_iri(item.id, column.name))
            if not expansion:
                return level
        return 5

    def expand_column(self, item_id: str, column_name: str) -> int:
        """Materialize the per-point RDF expansion of one container column."""
        item = self.get(item_id)
        if item.container is None:
            raise KItemError(f"k-item {item_id} has no container")
        column = item.container.column(column_name)
        graph_name = ns.expansion_graph_iri(item_id, column_name)
        base = f"dsms://kitem/{item_id}/expansion/{column_name}"
        triples = []
        for i, value in enumerate(column.values):
            row = Iri(f"{base}/{i}")
            triples.append(Triple(row, ns.DSMS_ROW_INDEX, integer_literal(i)))
            triples.append(Triple(row, ns.DSMS_VALUE, double_literal(float(value))))
            if column.concept is not None:
                triples.append(Triple(row, ns.A, column.concept))
        self.store.drop_graph(graph_name)
        return self.store.insert(graph_name, triples)

    # link graph ------------------------------------------------------
    def export_link_graph(self, root_id: str, depth: int) -> dict:
        """Breadth-first closure over links (both directions) up to depth."""
        root = self.get(root_id)
        if depth < 0:
            raise KItemError("depth must be >= 0")
        adjacency: dict[str, list[tuple[str, str, Iri]]] = {i: [] for i in self.items}
        for item in self.items.values():
            for link in item.links:
                adjacency[item.id].append((item.id, link.target, link.relation))
                adjacency[link.target].append((item.id, link.target, link.relation))

        visited = {root.id}
        frontier = [root.id]
        edges = []
        seen_edges = set()
        for _ in range(depth):
            next_frontier = []
            for node in frontier:
                for src, tgt, rel in sorted(
                    adjacency[node], key=lambda e: (e[0], e[1], e[2].value)
                ):
                    key = (src, tgt, rel.value)
                    if key not in seen_edges:
                        seen_edges.add(key)
                        edges.append(key)
                    other = tgt if src == node else src
                    if other not in visited:
                        visited.add(other)
                        next_frontier.append(other)
            frontier = sorted(next_frontier)
            if not frontier:
                break
        nodes = [
            {"id": i, "name": self.items[i].name, "ktype": self.items[i].ktype}
            for i in sorted(visited)
        ]
        return {
            "nodes": nodes,
            "edges": [
                {"source": s, "target": t, "relation": r} for s, t, r in sorted(edges)
            ],
        }

    # coherence -------------------------------------------------------
    def reconcile(self) -> list[str]:
        """Zero diffs means metadata links and graph triples agree."""
        diffs = []
        item_iris = {ns.kitem_graph_iri(i): i for i in self.items}
        skip = {ns.A, ns.DSMS_KTYPE, ns.DSMS_HAS_ANNOTATION}
        for item in self.items.values():
            graph = self.store.graph(item.graph_iri)
            triple_links = {
                (t.predicate.value, t.object.value)
                for t in graph
                if t.subject == item.iri
                and isinstance(t.object, Iri)
                and t.object.value in item_iris
                and t.predicate not in skip
            }
            meta_links = {
                (l.relation.value, ns.kitem_graph_iri(l.target)) for l in item.links
            }
            for rel, tgt in meta_links - triple_links:
                diffs.append(f"{item.id}: link {rel} -> {tgt} missing triple")
            for rel, tgt in triple_links - meta_links:
                diffs.append(f"{item.id}: triple {rel} -> {tgt} missing link")
        return diffs

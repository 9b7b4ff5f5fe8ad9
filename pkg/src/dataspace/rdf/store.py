"""Named-graph triple store with set semantics and Turtle persistence."""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .terms import Iri, Triple
from .turtle import BlankNodeAllocator, parse_turtle, serialize_turtle

DEFAULT_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "prov": "http://www.w3.org/ns/prov#",
    "dcterms": "http://purl.org/dc/terms/",
    "qudt": "http://qudt.org/schema/qudt/",
}


class QuadStore:
    """Map of graph IRI -> set of triples. Single writer, many readers;
    reads hand out snapshots."""

    def __init__(self, prefixes: dict[str, str] | None = None):
        self._graphs: dict[str, set[Triple]] = {}
        self.prefixes: dict[str, str] = dict(DEFAULT_PREFIXES)
        if prefixes:
            self.prefixes.update(prefixes)
        self.allocator = BlankNodeAllocator()
        self._lock = threading.RLock()

    # mutation ------------------------------------------------------
    def insert(self, graph_iri: Iri | str, triples) -> int:
        name = _graph_name(graph_iri)
        with self._lock:
            graph = self._graphs.setdefault(name, set())
            before = len(graph)
            graph.update(triples)
            return len(graph) - before

    def remove(self, graph_iri: Iri | str, triples) -> int:
        name = _graph_name(graph_iri)
        with self._lock:
            graph = self._graphs.get(name)
            if graph is None:
                return 0
            before = len(graph)
            graph.difference_update(triples)
            return before - len(graph)

    def drop_graph(self, graph_iri: Iri | str) -> int:
        name = _graph_name(graph_iri)
        with self._lock:
            graph = self._graphs.pop(name, None)
            return len(graph) if graph else 0

    def bind_prefix(self, name: str, base: str):
        with self._lock:
            self.prefixes[name] = base

    def load_turtle(self, graph_iri: Iri | str, text: str, base: str | None = None) -> int:
        triples = parse_turtle(text, base=base, allocator=self.allocator)
        return self.insert(graph_iri, triples)

    # access --------------------------------------------------------
    def graph(self, graph_iri: Iri | str) -> list[Triple]:
        """Deterministic snapshot of one graph (sorted s, p, o)."""
        with self._lock:
            graph = self._graphs.get(_graph_name(graph_iri), set())
            return sorted(graph, key=Triple.sort_key)

    def graph_names(self) -> list[str]:
        with self._lock:
            return sorted(self._graphs)

    def all_triples(self) -> list[Triple]:
        with self._lock:
            out: set[Triple] = set()
            for graph in self._graphs.values():
                out.update(graph)
        return sorted(out, key=Triple.sort_key)

    def has_graph(self, graph_iri: Iri | str) -> bool:
        return _graph_name(graph_iri) in self._graphs

    def __len__(self):
        return sum(len(g) for g in self._graphs.values())

    def serialize_graph(self, graph_iri: Iri | str) -> str:
        return serialize_turtle(self.graph(graph_iri), self.prefixes)

    # persistence ---------------------------------------------------
    def save(self, directory: Path):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        manifest = {"prefixes": self.prefixes, "graphs": {}}
        for i, name in enumerate(self.graph_names()):
            filename = f"graph{i:04d}.ttl"
            manifest["graphs"][name] = filename
            (directory / filename).write_text(self.serialize_graph(name), encoding="utf-8")
        (directory / "index.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def load(cls, directory: Path) -> "QuadStore":
        directory = Path(directory)
        manifest = json.loads((directory / "index.json").read_text(encoding="utf-8"))
        store = cls(prefixes=manifest.get("prefixes", {}))
        for name, filename in manifest["graphs"].items():
            store.load_turtle(name, (directory / filename).read_text(encoding="utf-8"))
        return store


def _graph_name(graph_iri: Iri | str) -> str:
    if isinstance(graph_iri, Iri):
        return graph_iri.value
    return Iri(graph_iri).value

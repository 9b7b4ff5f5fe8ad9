"""Provenance recording and backward tracing over a dedicated named graph,
using the PROV vocabulary (Activity, Entity, used, wasGeneratedBy)."""

from __future__ import annotations

from . import ns
from .rdf import Iri, QuadStore, Triple, string_literal


class ProvenanceError(ValueError):
    pass


class ProvenanceLog:
    def __init__(self, store: QuadStore):
        self.store = store

    def graph(self):
        return self.store.graph(ns.PROVENANCE_GRAPH)

    def record_activity(
        self,
        activity: Iri,
        used: list[Iri],
        generated: list[Iri],
        agent: Iri | None = None,
        label: str | None = None,
        failed: bool = False,
    ) -> int:
        if not used:
            raise ProvenanceError("an activity must use at least one entity")
        existing = self.graph()
        for entity in generated:
            for t in existing:
                if t.subject == entity and t.predicate == ns.PROV_WAS_GENERATED_BY:
                    raise ProvenanceError(
                        f"entity {entity.value} already has a generating activity"
                    )
        triples = [Triple(activity, ns.A, ns.PROV_ACTIVITY)]
        if label:
            triples.append(Triple(activity, ns.RDFS_LABEL, string_literal(label)))
        for entity in used:
            triples.append(Triple(entity, ns.A, ns.PROV_ENTITY))
            triples.append(Triple(activity, ns.PROV_USED, entity))
        for entity in generated:
            triples.append(Triple(entity, ns.A, ns.PROV_ENTITY))
            triples.append(Triple(entity, ns.PROV_WAS_GENERATED_BY, activity))
        if agent is not None:
            triples.append(Triple(agent, ns.A, ns.PROV_AGENT))
            triples.append(Triple(activity, ns.PROV_WAS_ASSOCIATED_WITH, agent))
        if failed:
            triples.append(Triple(activity, ns.DSMS_FAILED, string_literal("true")))
        return self.store.insert(ns.PROVENANCE_GRAPH, triples)

    # tracing -----------------------------------------------------------
    def generator_of(self, entity: Iri) -> Iri | None:
        for t in self.graph():
            if t.subject == entity and t.predicate == ns.PROV_WAS_GENERATED_BY:
                return t.object
        return None

    def used_by(self, activity: Iri) -> list[Iri]:
        return sorted(
            (
                t.object
                for t in self.graph()
                if t.subject == activity and t.predicate == ns.PROV_USED
            ),
            key=lambda i: i.value,
        )

    def settings_of(self, activity: Iri) -> Iri | None:
        for entity in self.used_by(activity):
            if entity.value.endswith("/settings"):
                return entity
        return None

    def is_entity(self, node: Iri) -> bool:
        return any(
            t.subject == node and t.predicate == ns.A and t.object == ns.PROV_ENTITY
            for t in self.graph()
        )

    def trace(self, entity: Iri) -> list[list[Iri]]:
        """Backward closure from an entity: alternating activity/entity
        chains ending at entities with no generating activity. The queried
        entity itself is not repeated at the head of each chain."""
        if not self.is_entity(entity):
            raise ProvenanceError(f"unknown entity {entity.value}")

        chains: list[list[Iri]] = []

        def walk(current: Iri, prefix: list[Iri], seen: frozenset):
            if current.value in seen:
                raise ProvenanceError("provenance cycle")
            seen = seen | {current.value}
            activity = self.generator_of(current)
            if activity is None:
                chains.append(prefix)
                return
            used = self.used_by(activity)
            sources = [e for e in used if self.generator_of(e) is not None]
            terminals = [e for e in used if self.generator_of(e) is None]
            if not sources:
                # activity consumed only primary entities: the chain ends at
                # the non-settings inputs (or all inputs if none remain)
                ends = [e for e in terminals if e != self.settings_of(activity)] or terminals
                for end in ends:
                    chains.append(prefix + [activity, end])
                return
            for nxt in sources:
                walk(nxt, prefix + [activity, nxt], seen)

        walk(entity, [], frozenset())
        return chains

"""Controlled-vocabulary registry: IRI minting, lookup and a simple taxonomy.

Terms are mirrored as triples into a dedicated graph so SPARQL sees them.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from . import ns
from .rdf import Iri, QuadStore, Triple, parse_turtle, serialize_turtle, string_literal


class VocabularyError(ValueError):
    pass


_TRANSLITERATIONS = str.maketrans(
    {"ä": "ae", "ö": "oe", "ü": "ue", "Ä": "Ae", "Ö": "Oe", "Ü": "Ue", "ß": "ss"}
)


def slug(label: str) -> str:
    """ASCII UpperCamelCase slug: umlauts transliterated, diacritics
    stripped, words split at non-alphanumerics, inner capitalization kept."""
    text = label.translate(_TRANSLITERATIONS)
    text = unicodedata.normalize("NFKD", text)
    text = "".join(c for c in text if not unicodedata.combining(c))
    words = re.split(r"[^0-9A-Za-z]+", text)
    parts = [w[0].upper() + w[1:] for w in words if w]
    return "".join(parts)


def mint_iri(namespace: str, label: str) -> Iri:
    if not label:
        raise VocabularyError("label must be non-empty")
    s = slug(label)
    if not s:
        raise VocabularyError(f"label {label!r} reduces to an empty slug")
    base = namespace if namespace.endswith(("/", "#")) else namespace + "/"
    return Iri(base + s)


@dataclass(frozen=True)
class VocabTerm:
    iri: Iri
    label: str
    namespace: str
    parent: Iri | None = None
    description: str | None = None


class VocabularyRegistry:
    """Registered terms keyed by IRI; registrations are atomic and mirrored
    into the vocabulary graph of the given store."""

    def __init__(self, store: QuadStore):
        self._store = store
        self._terms: dict[str, VocabTerm] = {}

    def register_term(
        self,
        namespace: str,
        label: str,
        parent: Iri | str | None = None,
        description: str | None = None,
    ) -> VocabTerm:
        iri = mint_iri(namespace, label)
        if iri.value in self._terms:
            existing = self._terms[iri.value]
            raise VocabularyError(
                f"IRI collision: {iri.value} already registered with label "
                f"{existing.label!r}"
            )
        parent_iri = Iri(parent) if isinstance(parent, str) else parent
        if parent_iri is not None:
            if parent_iri.value not in self._terms:
                raise VocabularyError(f"unknown parent term {parent_iri.value}")
            # parent chains are acyclic by construction: the new IRI cannot
            # appear in an existing chain, but guard anyway
            chain = parent_iri
            while chain is not None:
                if chain == iri:
                    raise VocabularyError("taxonomy cycle")
                chain = self._terms[chain.value].parent
        term = VocabTerm(iri, label, namespace, parent_iri, description)
        self._terms[iri.value] = term
        self._store.insert(ns.VOCABULARY_GRAPH, self._term_triples(term))
        return term

    def _term_triples(self, term: VocabTerm) -> list[Triple]:
        triples = [
            Triple(term.iri, ns.A, ns.DSMS_VOCAB_TERM),
            Triple(term.iri, ns.RDFS_LABEL, string_literal(term.label)),
            Triple(term.iri, ns.DSMS_NAMESPACE, Iri(term.namespace)),
        ]
        if term.parent is not None:
            triples.append(Triple(term.iri, ns.RDFS_SUBCLASS_OF, term.parent))
        if term.description:
            triples.append(
                Triple(term.iri, ns.DCTERMS_DESCRIPTION, string_literal(term.description))
            )
        return triples

    # lookup --------------------------------------------------------
    def has(self, iri: Iri | str) -> bool:
        key = iri.value if isinstance(iri, Iri) else iri
        return key in self._terms

    def get(self, iri: Iri | str) -> VocabTerm:
        key = iri.value if isinstance(iri, Iri) else iri
        try:
            return self._terms[key]
        except KeyError:
            raise VocabularyError(f"unregistered term {key}") from None

    def find_terms(self, query: str) -> list[VocabTerm]:
        needle = query.lower()
        hits = [
            t
            for t in self._terms.values()
            if needle in t.label.lower()
            or (t.description and needle in t.description.lower())
        ]
        hits.sort(key=lambda t: (t.label, t.iri.value))
        return hits

    def children(self, iri: Iri | str) -> list[VocabTerm]:
        parent = self.get(iri)
        hits = [t for t in self._terms.values() if t.parent == parent.iri]
        hits.sort(key=lambda t: (t.label, t.iri.value))
        return hits

    def all_terms(self) -> list[VocabTerm]:
        return sorted(self._terms.values(), key=lambda t: t.iri.value)

    def is_media_type(self, iri: Iri | str) -> bool:
        key = iri.value if isinstance(iri, Iri) else iri
        return key.startswith(ns.DSMS_MEDIA)

    # import/export -------------------------------------------------
    def export_turtle(self) -> str:
        triples = []
        for term in self.all_terms():
            triples.extend(self._term_triples(term))
        return serialize_turtle(triples, ns.PREFIXES)

    def import_turtle(self, text: str) -> int:
        triples = parse_turtle(text)
        by_subject: dict = {}
        for t in triples:
            by_subject.setdefault(t.subject, []).append(t)
        terms = []
        for subject, group in by_subject.items():
            props = {t.predicate: t.object for t in group}
            if props.get(ns.A) != ns.DSMS_VOCAB_TERM:
                continue
            label = props[ns.RDFS_LABEL].lexical
            namespace = props[ns.DSMS_NAMESPACE].value
            parent = props.get(ns.RDFS_SUBCLASS_OF)
            desc = props.get(ns.DCTERMS_DESCRIPTION)
            terms.append((namespace, label, parent, desc.lexical if desc else None))
        # parents must exist before children
        count = 0
        pending = terms
        while pending:
            progressed = []
            deferred = []
            for namespace, label, parent, desc in pending:
                iri = mint_iri(namespace, label)
                if self.has(iri):
                    continue
                if parent is not None and not self.has(parent):
                    deferred.append((namespace, label, parent, desc))
                    continue
                self.register_term(namespace, label, parent, desc)
                count += 1
                progressed.append(label)
            if not progressed and deferred:
                missing = ", ".join(x[1] for x in deferred)
                raise VocabularyError(f"unresolvable parents for: {missing}")
            pending = deferred
        return count


def media_type_concept(media_type: str) -> Iri:
    return mint_iri(ns.DSMS_MEDIA, media_type)

"""Faceted and free-text search over k-items with a pluggable scorer.

The default scorer is BM25 (k1=1.2, b=0.75) over a token index; an
embedding-based scorer can replace it without touching the search logic.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .kitems import KItem, KItemStore
from .rdf import Iri
from .vocabulary import VocabularyRegistry

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass
class SearchDoc:
    kitem_id: str
    tokens: Counter
    length: int
    updated: str
    ktype: str
    annotations: frozenset[str]


@dataclass(frozen=True)
class SearchHit:
    kitem_id: str
    score: float
    matched_annotations: tuple[str, ...] = ()


class SimilarityScorer:
    """Scoring seam: given query tokens and the corpus, score one doc."""

    def prepare(self, docs: list[SearchDoc]):
        raise NotImplementedError

    def score(self, query_tokens: list[str], doc: SearchDoc) -> float:
        raise NotImplementedError


class Bm25Scorer(SimilarityScorer):
    def __init__(self, k1: float = 1.2, b: float = 0.75):
        self.k1 = k1
        self.b = b
        self._idf: dict[str, float] = {}
        self._avgdl = 1.0

    def prepare(self, docs: list[SearchDoc]):
        n = len(docs)
        df = Counter()
        for doc in docs:
            df.update(doc.tokens.keys())
        self._idf = {
            t: math.log((n - dfi + 0.5) / (dfi + 0.5) + 1.0) for t, dfi in df.items()
        }
        total = sum(d.length for d in docs)
        self._avgdl = total / n if n else 1.0

    def score(self, query_tokens, doc) -> float:
        s = 0.0
        norm = self.k1 * (1 - self.b + self.b * doc.length / self._avgdl)
        for t in query_tokens:
            f = doc.tokens.get(t, 0)
            if f == 0:
                continue
            s += self._idf.get(t, 0.0) * f * (self.k1 + 1) / (f + norm)
        return s


class SearchIndex:
    """One SearchDoc per k-item, rebuilt on every mutation."""

    def __init__(self, vocabulary: VocabularyRegistry, scorer: SimilarityScorer | None = None):
        self.vocabulary = vocabulary
        self.scorer = scorer or Bm25Scorer()
        self._docs: dict[str, SearchDoc] = {}

    # indexing ------------------------------------------------------
    def index(self, item: KItem) -> SearchDoc:
        parts = [item.name, item.summary]
        for annotation in item.annotations:
            if self.vocabulary.has(annotation):
                parts.append(self.vocabulary.get(annotation).label)
        # metadata keys and string values from the item graph are appended
        # by the caller via extra_text when available
        tokens = Counter(tokenize(" ".join(p for p in parts if p)))
        doc = SearchDoc(
            kitem_id=item.id,
            tokens=tokens,
            length=sum(tokens.values()),
            updated=item.updated,
            ktype=item.ktype,
            annotations=frozenset(a.value for a in item.annotations),
        )
        self._docs[item.id] = doc
        return doc

    def index_with_text(self, item: KItem, extra_text: str) -> SearchDoc:
        doc = self.index(item)
        extra = Counter(tokenize(extra_text))
        doc.tokens.update(extra)
        doc.length += sum(extra.values())
        return doc

    def remove(self, item_id: str):
        self._docs.pop(item_id, None)

    def doc(self, item_id: str) -> SearchDoc | None:
        return self._docs.get(item_id)

    # queries -------------------------------------------------------
    def facet_search(
        self,
        ktypes: list[str] | None = None,
        annotations: list[Iri | str] | None = None,
    ) -> list[SearchHit]:
        """k-types combine as OR, annotations as AND; pure filter, score 1."""
        if not ktypes and not annotations:
            raise ValueError("facet search needs at least one criterion")
        wanted = {a.value if isinstance(a, Iri) else a for a in (annotations or [])}
        hits = []
        for doc in self._docs.values():
            if ktypes and doc.ktype not in ktypes:
                continue
            if wanted and not wanted.issubset(doc.annotations):
                continue
            hits.append(
                SearchHit(doc.kitem_id, 1.0, tuple(sorted(wanted & doc.annotations)))
            )
        return self._ordered(hits)

    def text_search(self, text: str, limit: int | None = None) -> list[SearchHit]:
        if not text:
            raise ValueError("text search needs a non-empty query")
        query_tokens = tokenize(text)
        docs = list(self._docs.values())
        self.scorer.prepare(docs)
        hits = []
        for doc in docs:
            if not any(t in doc.tokens for t in query_tokens):
                continue
            score = self.scorer.score(query_tokens, doc)
            if score > 0:
                hits.append(SearchHit(doc.kitem_id, score))
        hits = self._ordered(hits)
        return hits[:limit] if limit is not None else hits

    def search(
        self,
        text: str | None = None,
        ktypes: list[str] | None = None,
        annotations: list[Iri | str] | None = None,
        limit: int | None = None,
    ) -> list[SearchHit]:
        """Combined query: facets filter first, then BM25 ranks survivors."""
        if ktypes or annotations:
            survivors = {h.kitem_id: h for h in self.facet_search(ktypes, annotations)}
            if not text:
                hits = list(survivors.values())
                hits = self._ordered(hits)
                return hits[:limit] if limit is not None else hits
            ranked = [h for h in self.text_search(text) if h.kitem_id in survivors]
            ranked = [
                SearchHit(h.kitem_id, h.score, survivors[h.kitem_id].matched_annotations)
                for h in ranked
            ]
            return ranked[:limit] if limit is not None else ranked
        if text:
            return self.text_search(text, limit)
        raise ValueError("empty search query")

    def _ordered(self, hits: list[SearchHit]) -> list[SearchHit]:
        def key(h: SearchHit):
            doc = self._docs[h.kitem_id]
            return (-h.score, _reverse_text(doc.updated), h.kitem_id)

        return sorted(hits, key=key)


def _reverse_text(text: str) -> tuple:
    # sorts newer-first while keeping the overall sort ascending
    return tuple(-ord(c) for c in text)


def wire_index(index: SearchIndex, kitems: KItemStore):
    """Subscribe the index to k-item mutations, bundling graph metadata text."""

    def on_change(item: KItem):
        from . import ns

        graph = kitems.store.graph(item.graph_iri)
        extras = []
        for t in graph:
            if t.predicate in (ns.DSMS_ORIGINAL_KEY, ns.DSMS_VALUE) and hasattr(
                t.object, "lexical"
            ):
                extras.append(t.object.lexical)
        index.index_with_text(item, " ".join(extras))

    kitems.on_change.append(on_change)

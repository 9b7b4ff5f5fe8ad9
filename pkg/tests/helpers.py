"""Shared test utilities: fixture loading, random graph generation, and
independent oracles kept deliberately separate from the implementations
they check."""

from __future__ import annotations

import itertools
import json
import math
import random
from collections import Counter
from pathlib import Path

from dataspace import ns
from dataspace.rdf import BlankNode, Iri, Literal, Triple, Var
from dataspace.rdf.terms import LANG_STRING, XSD_DOUBLE, XSD_INTEGER

FIXTURES = Path(__file__).parent / "fixtures"

STEEL = ns.STEEL


def fig7_bytes() -> bytes:
    return (FIXTURES / "fig7.csv").read_bytes()


def fig7_mapping() -> bytes:
    return (FIXTURES / "fig7-mapping.json").read_bytes()


def fig7_config() -> dict:
    return json.loads((FIXTURES / "fig7-config.json").read_text(encoding="utf-8"))


def fig14_bytes() -> bytes:
    return (FIXTURES / "fig14.csv").read_bytes()


def fig14_mapping() -> bytes:
    return (FIXTURES / "fig14-mapping.json").read_bytes()


def fig14_config() -> dict:
    return json.loads((FIXTURES / "fig14-config.json").read_text(encoding="utf-8"))


# random graphs --------------------------------------------------------


def random_term(rng: random.Random, kind: str):
    if kind == "iri":
        return Iri(f"http://example.org/{rng.choice('abcdefgh')}{rng.randint(0, 5)}")
    if kind == "bnode":
        return BlankNode(f"n{rng.randint(0, 6)}")
    choice = rng.randint(0, 3)
    if choice == 0:
        return Literal(rng.choice(["alpha", "beta", "gamma", "delta"]))
    if choice == 1:
        return Literal(str(rng.randint(-20, 20)), Iri(XSD_INTEGER))
    if choice == 2:
        return Literal(repr(rng.uniform(-5, 5)), Iri(XSD_DOUBLE))
    return Literal(rng.choice(["rot", "blau"]), Iri(LANG_STRING), language="de")


def random_graph(rng: random.Random, max_triples: int = 50) -> list[Triple]:
    n = rng.randint(1, max_triples)
    triples = set()
    for _ in range(n):
        subject = random_term(rng, "bnode" if rng.random() < 0.3 else "iri")
        predicate = random_term(rng, "iri")
        obj = random_term(
            rng, rng.choice(["iri", "bnode", "literal", "literal"])
        )
        triples.add(Triple(subject, predicate, obj))
    return sorted(triples, key=Triple.sort_key)


# brute-force SPARQL oracle ---------------------------------------------


def brute_force_select(triples, patterns, filters=(), distinct=False):
    """Exhaustive cartesian-product evaluation, independent of the engine:
    enumerates every assignment of triples to patterns."""

    def unify(pattern, triple, env):
        env = dict(env)
        for part, term in zip(pattern, (triple.subject, triple.predicate, triple.object)):
            if isinstance(part, Var):
                if part.name in env and env[part.name] != term:
                    return None
                env[part.name] = term
            elif part != term:
                return None
        return env

    rows = []
    for combo in itertools.product(triples, repeat=len(patterns)):
        env: dict | None = {}
        for pattern, triple in zip(patterns, combo):
            env = unify(pattern, triple, env)
            if env is None:
                break
        if env is None:
            continue
        if all(f(env) for f in filters):
            rows.append(env)
    if distinct:
        seen = set()
        unique = []
        for row in rows:
            key = tuple(sorted((k, repr(v)) for k, v in row.items()))
            if key not in seen:
                seen.add(key)
                unique.append(row)
        rows = unique
    return rows


# independent BM25 -------------------------------------------------------


def bm25_reference(query_tokens, doc_tokens_list, doc_index, k1=1.2, b=0.75):
    """Textbook BM25 with the +1 idf smoothing, written from the formula."""
    n = len(doc_tokens_list)
    avgdl = sum(len(d) for d in doc_tokens_list) / n
    doc = doc_tokens_list[doc_index]
    counts = Counter(doc)
    score = 0.0
    for term in query_tokens:
        df = sum(1 for d in doc_tokens_list if term in d)
        idf = math.log((n - df + 0.5) / (df + 0.5) + 1.0)
        f = counts[term]
        if f:
            score += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * len(doc) / avgdl))
    return score


# Kupfer corpus -----------------------------------------------------------

ALLOYS = [
    # (name, copper content wt.%, base hardness HBW)
    ("CuZn38As", 62.0, 107.0),
    ("CuZn21Si3P", 76.0, 128.0),
    ("CuNi12Al3", 85.0, 172.0),
    ("CuSn12", 88.0, 95.0),
    ("CuSn6", 94.0, 82.0),
    ("CuNiSi", 96.5, 118.0),
]


def kupfer_corpus(seed: int = 7):
    """30 hardness CSVs (6 alloys x 5 repetitions) in the comma-delimited
    key/value shape; CuNi12Al3 carries the maximum mean by construction."""
    rng = random.Random(seed)
    datasets = []
    for alloy, copper, base in ALLOYS:
        for rep in range(1, 6):
            hardness = round(base + rng.uniform(-6.0, 6.0), 6)
            rows = [
                "Name,Value,",
                f"ID,{rep}.0,",
                f"Test Piece Identifier,{alloy}-{rep},",
                f"Test Piece Composition,{alloy},",
                "Test Piece Producer,Copperalliance,",
                f"Test Piece Copper Content,{copper},wt.%",
                f"Indentation Repetition,{rep}.0,",
                f"Brinell Hardness,{hardness},HBW",
                "Test Piece Thickness,8,mm",
            ]
            datasets.append(
                {
                    "id": f"{alloy.lower()}-{rep}",
                    "alloy": alloy,
                    "copper": copper,
                    "hardness": hardness,
                    "csv": ("\n".join(rows) + "\n").encode("utf-8"),
                }
            )
    return datasets


def ckan_catalog(datasets) -> bytes:
    """CKAN package_search response wrapping the Kupfer corpus."""
    results = [
        {
            "id": d["id"],
            "title": f"Brinell hardness of {d['alloy']} (repetition {d['id'].rsplit('-', 1)[1]})",
            "notes": f"Hardness measurement for copper alloy {d['alloy']}",
            "resources": [
                {
                    "url": f"https://repo.example.org/{d['id']}.csv",
                    "format": "CSV",
                }
            ],
            "tags": [{"name": "hardness"}, {"name": d["alloy"]}],
        }
        for d in datasets
    ]
    return json.dumps(
        {"success": True, "result": {"count": len(results), "results": results}}
    ).encode("utf-8")

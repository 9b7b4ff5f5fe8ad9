"""RDF term model: IRIs, literals, blank nodes and triples."""

from __future__ import annotations

from dataclasses import dataclass, field

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
LANG_STRING = RDF_NS + "langString"

NUMERIC_DATATYPES = frozenset(
    {XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE, XSD + "float", XSD + "long", XSD + "int"}
)


class RdfError(ValueError):
    """Malformed RDF term or triple."""


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        v = self.value
        if not v:
            raise RdfError("IRI must be non-empty")
        if any(c.isspace() for c in v):
            raise RdfError(f"IRI contains whitespace: {v!r}")
        scheme, sep, rest = v.partition(":")
        if not sep or not scheme or not scheme[0].isalpha():
            raise RdfError(f"IRI lacks a scheme: {v!r}")

    def __str__(self):
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Iri = field(default_factory=lambda: Iri(XSD_STRING))
    language: str | None = None

    def __post_init__(self):
        if self.language is not None and self.datatype.value != LANG_STRING:
            raise RdfError("language tag requires the language-string datatype")
        if self.datatype.value in NUMERIC_DATATYPES:
            try:
                float(self.lexical)
            except ValueError:
                raise RdfError(
                    f"bad lexical form {self.lexical!r} for {self.datatype.value}"
                ) from None

    @property
    def is_numeric(self) -> bool:
        return self.datatype.value in NUMERIC_DATATYPES

    def numeric_value(self) -> float:
        if not self.is_numeric:
            raise RdfError(f"literal {self.lexical!r} is not numeric")
        return float(self.lexical)

    def __str__(self):
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype.value == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype.value}>'


@dataclass(frozen=True, order=True)
class BlankNode:
    label: str

    def __str__(self):
        return f"_:{self.label}"


Term = Iri | Literal | BlankNode
Subject = Iri | BlankNode


def _sort_key(term: Term):
    # Iris < blank nodes < literals, each ordered lexicographically.
    if isinstance(term, Iri):
        return (0, term.value, "", "")
    if isinstance(term, BlankNode):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype.value, term.language or "")


@dataclass(frozen=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term

    def __post_init__(self):
        if isinstance(self.subject, Literal):
            raise RdfError("literal subjects are not allowed")
        if not isinstance(self.predicate, Iri):
            raise RdfError("predicate must be an IRI")

    def sort_key(self):
        return (_sort_key(self.subject), _sort_key(self.predicate), _sort_key(self.object))


def term_sort_key(term: Term):
    return _sort_key(term)


def string_literal(text: str) -> Literal:
    return Literal(text)


def double_literal(value: float) -> Literal:
    return Literal(repr(float(value)), Iri(XSD_DOUBLE))


def integer_literal(value: int) -> Literal:
    return Literal(str(int(value)), Iri(XSD_INTEGER))

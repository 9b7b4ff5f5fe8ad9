import pytest
from hypothesis import given, strategies as st

from dataspace.rdf import (
    BlankNode,
    Iri,
    Literal,
    RdfError,
    Triple,
    double_literal,
    integer_literal,
    string_literal,
)
from dataspace.rdf.terms import (
    LANG_STRING,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    term_sort_key,
)


def test_iri_requires_scheme():
    Iri("https://example.org/x")
    Iri("dsms://kitem/a")
    with pytest.raises(RdfError):
        Iri("no-scheme-here")
    with pytest.raises(RdfError):
        Iri("")
    with pytest.raises(RdfError):
        Iri("http://example.org/with space")


def test_literal_defaults_to_string():
    lit = Literal("hello")
    assert lit.datatype.value == XSD_STRING
    assert not lit.is_numeric


def test_numeric_literal_validation():
    assert Literal("3.5", Iri(XSD_DOUBLE)).numeric_value() == 3.5
    assert Literal("-7", Iri(XSD_INTEGER)).numeric_value() == -7
    with pytest.raises(RdfError):
        Literal("abc", Iri(XSD_DOUBLE))
    with pytest.raises(RdfError):
        Literal("x").numeric_value()


def test_language_tag_needs_langstring_datatype():
    lit = Literal("rot", Iri(LANG_STRING), language="de")
    assert lit.language == "de"
    with pytest.raises(RdfError):
        Literal("rot", Iri(XSD_STRING), language="de")


def test_triple_shape_constraints():
    s = Iri("http://example.org/s")
    p = Iri("http://example.org/p")
    with pytest.raises(RdfError):
        Triple(Literal("x"), p, s)
    with pytest.raises(RdfError):
        Triple(s, BlankNode("b"), s)  # type: ignore[arg-type]


def test_term_ordering_groups_kinds():
    # IRIs sort before blank nodes before literals
    terms = [Literal("a"), BlankNode("a"), Iri("http://a.example/")]
    ordered = sorted(terms, key=term_sort_key)
    assert isinstance(ordered[0], Iri)
    assert isinstance(ordered[1], BlankNode)
    assert isinstance(ordered[2], Literal)


def test_literal_constructors():
    assert string_literal("x") == Literal("x")
    assert double_literal(1.5) == Literal("1.5", Iri(XSD_DOUBLE))
    assert integer_literal(7) == Literal("7", Iri(XSD_INTEGER))


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_double_literal_round_trips_exactly(x):
    assert float(double_literal(x).lexical) == x


def test_triple_sort_key_is_total_on_duplicates():
    s = Iri("http://example.org/s")
    p = Iri("http://example.org/p")
    t1 = Triple(s, p, Literal("1", Iri(XSD_INTEGER)))
    t2 = Triple(s, p, Literal("1", Iri(XSD_DOUBLE)))
    assert t1 != t2
    assert t1.sort_key() != t2.sort_key()

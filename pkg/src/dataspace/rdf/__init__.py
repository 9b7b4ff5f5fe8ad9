from .terms import (
    BlankNode,
    Iri,
    Literal,
    RdfError,
    Term,
    Triple,
    double_literal,
    integer_literal,
    string_literal,
)
from .turtle import BlankNodeAllocator, TurtleSyntaxError, parse_turtle, serialize_turtle
from .store import QuadStore
from .compare import isomorphic
from .sparql import (
    Comparison,
    QueryError,
    RegexFilter,
    SelectQuery,
    Var,
    bindings_to_json,
    parse_sparql,
    run_sparql_json,
    select,
)

__all__ = [
    "BlankNode",
    "BlankNodeAllocator",
    "Comparison",
    "Iri",
    "Literal",
    "QuadStore",
    "QueryError",
    "RdfError",
    "RegexFilter",
    "SelectQuery",
    "Term",
    "Triple",
    "TurtleSyntaxError",
    "Var",
    "bindings_to_json",
    "double_literal",
    "integer_literal",
    "isomorphic",
    "parse_sparql",
    "parse_turtle",
    "run_sparql_json",
    "select",
    "serialize_turtle",
    "string_literal",
]

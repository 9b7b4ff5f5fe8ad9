"""SPARQL SELECT subset: basic graph patterns, FILTER (six comparators
plus regex), GRAPH scoping, DISTINCT, LIMIT/OFFSET, PREFIX.

Evaluation is an exhaustive nested-loop join with deterministic
(lexicographic) result ordering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    LANG_STRING,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    Term,
    Triple,
    term_sort_key,
)
from .store import QuadStore


class QueryError(ValueError):
    """Invalid query or type error during filter evaluation."""


@dataclass(frozen=True)
class Var:
    name: str


PatternPart = Term | Var
COMPARATORS = ("=", "!=", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Comparison:
    op: str
    left: PatternPart
    right: PatternPart

    def variables(self):
        return [x.name for x in (self.left, self.right) if isinstance(x, Var)]


@dataclass(frozen=True)
class RegexFilter:
    var: Var
    pattern: str
    flags: str = ""

    def variables(self):
        return [self.var.name]


Filter = Comparison | RegexFilter


@dataclass
class SelectQuery:
    variables: list[str] = field(default_factory=list)  # empty = project all
    patterns: list[tuple[PatternPart, PatternPart, PatternPart]] = field(default_factory=list)
    filters: list[Filter] = field(default_factory=list)
    graph_scope: Iri | None = None
    distinct: bool = False
    limit: int | None = None
    offset: int = 0

    def validate(self):
        if not self.patterns:
            raise QueryError("query has no triple patterns")
        if self.limit is not None and self.limit < 0:
            raise QueryError("limit must be >= 0")
        if self.offset < 0:
            raise QueryError("offset must be >= 0")
        in_patterns = self.pattern_variables()
        for f in self.filters:
            for name in f.variables():
                if name not in in_patterns:
                    raise QueryError(f"filter variable ?{name} not bound by any pattern")
        for name in self.variables:
            if name not in in_patterns:
                raise QueryError(f"projected variable ?{name} not bound by any pattern")

    def pattern_variables(self) -> list[str]:
        seen: list[str] = []
        for s, p, o in self.patterns:
            for part in (s, p, o):
                if isinstance(part, Var) and part.name not in seen:
                    seen.append(part.name)
        return seen


# evaluation ----------------------------------------------------------


def _match(part: PatternPart, term: Term, binding: dict) -> dict | None:
    if isinstance(part, Var):
        bound = binding.get(part.name)
        if bound is None:
            new = dict(binding)
            new[part.name] = term
            return new
        return binding if bound == term else None
    return binding if part == term else None


def _numeric(term: Term) -> float | None:
    if isinstance(term, Literal) and term.is_numeric:
        return term.numeric_value()
    return None


def _comparable_strings(term: Term) -> str | None:
    if isinstance(term, Literal) and not term.is_numeric:
        return term.lexical
    return None


def _resolve(part: PatternPart, binding: dict) -> Term:
    if isinstance(part, Var):
        return binding[part.name]
    return part


def _eval_comparison(f: Comparison, binding: dict) -> bool:
    left = _resolve(f.left, binding)
    right = _resolve(f.right, binding)
    ln, rn = _numeric(left), _numeric(right)
    if (ln is None) != (rn is None) and (
        isinstance(left, Literal) and isinstance(right, Literal)
    ):
        raise QueryError("cannot compare numeric and non-numeric literals")
    if ln is not None and rn is not None:
        a, b = ln, rn
    elif f.op in ("=", "!="):
        a, b = left, right
        if f.op == "=":
            return a == b
        return a != b
    else:
        ls, rs = _comparable_strings(left), _comparable_strings(right)
        if ls is None or rs is None:
            raise QueryError(f"operator {f.op} requires two literals of one kind")
        a, b = ls, rs
    return {
        "=": a == b,
        "!=": a != b,
        "<": a < b,
        "<=": a <= b,
        ">": a > b,
        ">=": a >= b,
    }[f.op]


def _eval_regex(f: RegexFilter, binding: dict) -> bool:
    term = binding[f.var.name]
    if isinstance(term, Literal):
        text = term.lexical
    elif isinstance(term, Iri):
        text = term.value
    else:
        return False
    flags = re.IGNORECASE if "i" in f.flags else 0
    try:
        return re.search(f.pattern, text, flags) is not None
    except re.error as exc:
        raise QueryError(f"bad regex {f.pattern!r}: {exc}") from None


def select(store: QuadStore, query: SelectQuery) -> list[dict[str, Term]]:
    """Evaluate a SELECT query; bindings sorted lexicographically over the
    projected values."""
    query.validate()
    if query.graph_scope is not None:
        triples = store.graph(query.graph_scope)
    else:
        triples = store.all_triples()

    # compile filters early so regex errors surface even on empty data
    for f in query.filters:
        if isinstance(f, RegexFilter):
            try:
                re.compile(f.pattern)
            except re.error as exc:
                raise QueryError(f"bad regex {f.pattern!r}: {exc}") from None

    solutions: list[dict] = [{}]
    for s, p, o in query.patterns:
        next_solutions = []
        for binding in solutions:
            for t in triples:
                b = _match(s, t.subject, binding)
                if b is None:
                    continue
                b = _match(p, t.predicate, b)
                if b is None:
                    continue
                b = _match(o, t.object, b)
                if b is not None:
                    next_solutions.append(b)
        solutions = next_solutions

    for f in query.filters:
        if isinstance(f, Comparison):
            solutions = [b for b in solutions if _eval_comparison(f, b)]
        else:
            solutions = [b for b in solutions if _eval_regex(f, b)]

    names = query.variables or query.pattern_variables()
    rows = [{n: b[n] for n in names} for b in solutions]

    def row_key(row):
        return tuple(term_sort_key(row[n]) for n in names)

    if query.distinct:
        unique = {}
        for row in rows:
            unique.setdefault(row_key(row), row)
        rows = list(unique.values())
    rows.sort(key=row_key)

    rows = rows[query.offset:]
    if query.limit is not None:
        rows = rows[: query.limit]
    return rows


# SPARQL text parsing -------------------------------------------------

_SPARQL_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<iriref><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<double>[+-]?(?:\d+\.\d*|\.?\d+)[eE][+-]?\d+)
  | (?P<decimal>[+-]?\d*\.\d+)
  | (?P<integer>[+-]?\d+)
  | (?P<dtype>\^\^)
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<punct>[{}().;,\*])
  | (?P<pname>[A-Za-z0-9_\-]*:[A-Za-z0-9_\-.]*)
  | (?P<keyword>[A-Za-z_][A-Za-z0-9_]*)
""",
    re.VERBOSE,
)


def parse_sparql(text: str) -> SelectQuery:
    """Parse SPARQL SELECT text into a SelectQuery."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _SPARQL_TOKEN.match(text, pos)
        if m is None:
            raise QueryError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.lastgroup not in ("ws", "comment"):
            tokens.append((m.lastgroup, m.group()))
        pos = m.end()
    tokens.append(("eof", ""))
    return _SparqlParser(tokens).parse()


class _SparqlParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.query = SelectQuery()

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, text=None):
        k, t = self.next()
        if k != kind or (text is not None and t.lower() != text.lower()):
            raise QueryError(f"expected {text or kind}, got {t!r}")
        return t

    def keyword(self, word) -> bool:
        k, t = self.peek()
        if k == "keyword" and t.lower() == word:
            self.next()
            return True
        return False

    def parse(self) -> SelectQuery:
        while self.keyword("prefix"):
            name = self.expect("pname")
            if not name.endswith(":"):
                raise QueryError("bad prefix declaration")
            iri = self.expect("iriref")
            self.prefixes[name[:-1]] = iri[1:-1]
        if not self.keyword("select"):
            raise QueryError("only SELECT queries are supported")
        if self.keyword("distinct"):
            self.query.distinct = True
        if self.peek() == ("punct", "*"):
            self.next()
        else:
            while self.peek()[0] == "var":
                self.query.variables.append(self.next()[1][1:])
            if not self.query.variables:
                raise QueryError("SELECT needs variables or *")
        self.keyword("where")
        self.group()
        while True:
            if self.keyword("limit"):
                self.query.limit = int(self.expect("integer"))
            elif self.keyword("offset"):
                self.query.offset = int(self.expect("integer"))
            else:
                break
        if self.peek()[0] != "eof":
            raise QueryError(f"trailing tokens at {self.peek()[1]!r}")
        self.query.validate()
        return self.query

    def group(self):
        self.expect("punct", "{")
        while True:
            k, t = self.peek()
            if (k, t) == ("punct", "}"):
                self.next()
                return
            if k == "keyword" and t.lower() == "filter":
                self.next()
                self.filter_expr()
            elif k == "keyword" and t.lower() == "graph":
                self.next()
                self.query.graph_scope = self.iri_term()
                self.group()
            elif k == "eof":
                raise QueryError("unterminated group pattern")
            else:
                self.triples_block()

    def iri_term(self) -> Iri:
        k, t = self.next()
        if k == "iriref":
            return Iri(t[1:-1])
        if k == "pname":
            prefix, _, local = t.partition(":")
            if prefix not in self.prefixes:
                raise QueryError(f"undefined prefix {prefix!r}")
            return Iri(self.prefixes[prefix] + local)
        raise QueryError(f"expected IRI, got {t!r}")

    def term(self) -> PatternPart:
        k, t = self.peek()
        if k == "var":
            self.next()
            return Var(t[1:])
        if k in ("iriref", "pname"):
            if k == "keyword" and t.lower() == "a":
                pass
            return self.iri_term()
        if k == "keyword" and t == "a":
            self.next()
            return Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
        if k == "string":
            self.next()
            lexical = t[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            nk, nt = self.peek()
            if nk == "dtype":
                self.next()
                return Literal(lexical, self.iri_term())
            return Literal(lexical)
        if k == "integer":
            self.next()
            return Literal(t, Iri(XSD_INTEGER))
        if k in ("decimal", "double"):
            self.next()
            return Literal(t, Iri(XSD_DOUBLE))
        raise QueryError(f"expected term, got {t!r}")

    def triples_block(self):
        subject = self.term()
        while True:
            predicate = self.term()
            while True:
                obj = self.term()
                self.query.patterns.append((subject, predicate, obj))
                if self.peek() == ("punct", ","):
                    self.next()
                    continue
                break
            if self.peek() == ("punct", ";"):
                self.next()
                k, t = self.peek()
                if (k, t) in (("punct", "."), ("punct", "}")):
                    break
                continue
            break
        if self.peek() == ("punct", "."):
            self.next()

    def filter_expr(self):
        self.expect("punct", "(")
        k, t = self.peek()
        if k == "keyword" and t.lower() == "regex":
            self.next()
            self.expect("punct", "(")
            var = self.term()
            if not isinstance(var, Var):
                raise QueryError("regex needs a variable as first argument")
            self.expect("punct", ",")
            pattern = self.term()
            if not isinstance(pattern, Literal):
                raise QueryError("regex needs a string pattern")
            flags = ""
            if self.peek() == ("punct", ","):
                self.next()
                flag_lit = self.term()
                if not isinstance(flag_lit, Literal):
                    raise QueryError("regex flags must be a string")
                flags = flag_lit.lexical
            self.expect("punct", ")")
            self.query.filters.append(RegexFilter(var, pattern.lexical, flags))
        else:
            left = self.term()
            op_kind, op = self.next()
            if op_kind != "op":
                raise QueryError(f"expected comparator, got {op!r}")
            right = self.term()
            self.query.filters.append(Comparison(op, left, right))
        self.expect("punct", ")")


# SPARQL Results JSON -------------------------------------------------


def bindings_to_json(variables: list[str], rows: list[dict[str, Term]]) -> dict:
    """Standard SPARQL Results JSON shape (head.vars, results.bindings)."""
    bindings = []
    for row in rows:
        entry = {}
        for name in variables:
            term = row.get(name)
            if term is None:
                continue
            if isinstance(term, Iri):
                entry[name] = {"type": "uri", "value": term.value}
            elif isinstance(term, BlankNode):
                entry[name] = {"type": "bnode", "value": term.label}
            else:
                lit = {"type": "literal", "value": term.lexical}
                if term.language:
                    lit["xml:lang"] = term.language
                elif term.datatype.value not in (XSD_STRING, LANG_STRING):
                    lit["datatype"] = term.datatype.value
                entry[name] = lit
        bindings.append(entry)
    return {"head": {"vars": variables}, "results": {"bindings": bindings}}


def run_sparql_json(store: QuadStore, text: str) -> dict:
    query = parse_sparql(text)
    rows = select(store, query)
    names = query.variables or query.pattern_variables()
    return bindings_to_json(names, rows)

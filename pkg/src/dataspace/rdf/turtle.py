"""Turtle (RDF 1.1) parsing and deterministic serialization.

Covers the grammar subset the kernel exchanges: prefix/base directives,
predicate-object and object lists, 'a', blank node labels and anonymous
property lists, typed/tagged/numeric/boolean literals. Collections are
not supported.
"""

from __future__ import annotations

import re
from urllib.parse import urljoin

from .terms import (
    RDF_NS,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    RdfError,
    Term,
    Triple,
)


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<iriref><[^<>"{}|^`\\\s]*>)
  | (?P<long_string>\"\"\"(?:[^"\\]|\\.|\"(?!\"\")|\"\"(?!\"))*\"\"\"|'''(?:[^'\\]|\\.|'(?!'')|''(?!'))*''')
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<prefix_directive>@prefix\b|@base\b)
  | (?P<sparql_directive>(?i:PREFIX|BASE)\b)
  | (?P<bnode>_:[A-Za-z0-9_][A-Za-z0-9_.\-]*)
  | (?P<double>[+-]?(?:\d+\.\d*|\.?\d+)[eE][+-]?\d+)
  | (?P<decimal>[+-]?\d*\.\d+)
  | (?P<integer>[+-]?\d+)
  | (?P<langtag>@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*)
  | (?P<dtype>\^\^)
  | (?P<punct>[.;,\[\]()])
  | (?P<pname>[A-Za-z0-9_\-À-￿.%]*:[A-Za-z0-9_\-À-￿.%:]*)
  | (?P<keyword>[A-Za-z]+)
""",
    re.VERBOSE,
)

_STRING_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _unescape(raw: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        c = raw[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= len(raw):
            raise TurtleSyntaxError("dangling escape", line, col)
        e = raw[i + 1]
        if e in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[e])
            i += 2
        elif e == "u":
            out.append(chr(int(raw[i + 2 : i + 6], 16)))
            i += 6
        elif e == "U":
            out.append(chr(int(raw[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise TurtleSyntaxError(f"unknown escape \\{e}", line, col)
    return "".join(out)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TurtleSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        tok = m.group()
        if kind == "pname" and tok.endswith("."):
            # A trailing dot terminates the statement, not the local name.
            stripped = tok.rstrip(".")
            dots = len(tok) - len(stripped)
            tokens.append(_Token(kind, stripped, line, pos - line_start + 1))
            for k in range(dots):
                tokens.append(
                    _Token("punct", ".", line, pos - line_start + 1 + len(stripped) + k)
                )
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok, line, pos - line_start + 1))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class BlankNodeAllocator:
    """Mints fresh blank node labels; one scope per store or parse call."""

    def __init__(self, prefix: str = "b", start: int = 0):
        self.prefix = prefix
        self.counter = start

    def fresh(self) -> BlankNode:
        node = BlankNode(f"{self.prefix}{self.counter}")
        self.counter += 1
        return node


class _Parser:
    def __init__(self, tokens, base, allocator):
        self.tokens = tokens
        self.i = 0
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.allocator = allocator or BlankNodeAllocator()
        self.bnode_map: dict[str, BlankNode] = {}
        self.triples: list[Triple] = []

    # token helpers -------------------------------------------------
    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise TurtleSyntaxError(
                f"expected {text or kind}, got {tok.text!r}", tok.line, tok.col
            )
        return tok

    def error(self, message: str):
        tok = self.peek()
        raise TurtleSyntaxError(message, tok.line, tok.col)

    # productions ---------------------------------------------------
    def parse(self) -> list[Triple]:
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "prefix_directive":
                self.directive(at_form=True)
            elif tok.kind == "sparql_directive":
                self.directive(at_form=False)
            else:
                self.statement()
        return self.triples

    def directive(self, at_form: bool):
        tok = self.next()
        word = tok.text.lstrip("@").lower()
        if word == "prefix":
            name = self.expect("pname")
            if not name.text.endswith(":"):
                raise TurtleSyntaxError("bad prefix name", name.line, name.col)
            iriref = self.expect("iriref")
            self.prefixes[name.text[:-1]] = self.resolve_iri(iriref)
        else:  # base
            iriref = self.expect("iriref")
            self.base = self.resolve_iri(iriref)
        if at_form:
            self.expect("punct", ".")

    def resolve_iri(self, tok: _Token) -> str:
        raw = _unescape(tok.text[1:-1], tok.line, tok.col)
        if _SCHEME_RE.match(raw):
            return raw
        if self.base is None:
            raise TurtleSyntaxError(
                f"relative IRI {raw!r} without a base", tok.line, tok.col
            )
        return urljoin(self.base, raw)

    def statement(self):
        subject = self.subject()
        self.predicate_object_list(subject)
        self.expect("punct", ".")

    def subject(self):
        tok = self.peek()
        if tok.kind == "iriref":
            self.next()
            return Iri(self.resolve_iri(tok))
        if tok.kind == "pname":
            self.next()
            return self.expand_pname(tok)
        if tok.kind == "bnode":
            self.next()
            return self.labelled_bnode(tok)
        if tok.kind == "punct" and tok.text == "[":
            return self.blank_property_list()
        self.error(f"expected subject, got {tok.text!r}")

    def expand_pname(self, tok: _Token) -> Iri:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            raise TurtleSyntaxError(f"undefined prefix {prefix!r}", tok.line, tok.col)
        try:
            return Iri(self.prefixes[prefix] + local)
        except RdfError as exc:
            raise TurtleSyntaxError(str(exc), tok.line, tok.col) from None

    def labelled_bnode(self, tok: _Token) -> BlankNode:
        label = tok.text[2:]
        if label not in self.bnode_map:
            self.bnode_map[label] = self.allocator.fresh()
        return self.bnode_map[label]

    def blank_property_list(self) -> BlankNode:
        self.expect("punct", "[")
        node = self.allocator.fresh()
        if not (self.peek().kind == "punct" and self.peek().text == "]"):
            self.predicate_object_list(node)
        self.expect("punct", "]")
        return node

    def predicate_object_list(self, subject):
        while True:
            predicate = self.predicate()
            while True:
                obj = self.object()
                self.triples.append(Triple(subject, predicate, obj))
                if self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    continue
                break
            if self.peek().kind == "punct" and self.peek().text == ";":
                self.next()
                # trailing ';' before '.' or ']' is legal
                nxt = self.peek()
                if nxt.kind == "punct" and nxt.text in (".", "]"):
                    break
                continue
            break

    def predicate(self) -> Iri:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text == "a":
            self.next()
            return Iri(RDF_NS + "type")
        if tok.kind == "iriref":
            self.next()
            return Iri(self.resolve_iri(tok))
        if tok.kind == "pname":
            self.next()
            return self.expand_pname(tok)
        self.error(f"expected predicate, got {tok.text!r}")

    def object(self) -> Term:
        tok = self.peek()
        if tok.kind in ("iriref", "pname", "bnode"):
            return self.subject()
        if tok.kind == "punct" and tok.text == "[":
            return self.blank_property_list()
        if tok.kind in ("string", "long_string"):
            return self.literal()
        if tok.kind == "integer":
            self.next()
            return Literal(tok.text, Iri(XSD_INTEGER))
        if tok.kind == "decimal":
            self.next()
            return Literal(tok.text, Iri(XSD_DECIMAL))
        if tok.kind == "double":
            self.next()
            return Literal(tok.text, Iri(XSD_DOUBLE))
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.next()
            return Literal(tok.text, Iri(XSD_BOOLEAN))
        self.error(f"expected object, got {tok.text!r}")

    def literal(self) -> Literal:
        tok = self.next()
        if tok.kind == "long_string":
            raw = tok.text[3:-3]
        else:
            raw = tok.text[1:-1]
        value = _unescape(raw, tok.line, tok.col)
        nxt = self.peek()
        if nxt.kind == "langtag":
            self.next()
            return Literal(value, Iri(RDF_NS + "langString"), nxt.text[1:])
        if nxt.kind == "dtype":
            self.next()
            dt = self.peek()
            if dt.kind == "iriref":
                self.next()
                datatype = Iri(self.resolve_iri(dt))
            elif dt.kind == "pname":
                self.next()
                datatype = self.expand_pname(dt)
            else:
                self.error("expected datatype IRI after ^^")
            try:
                return Literal(value, datatype)
            except RdfError as exc:
                raise TurtleSyntaxError(str(exc), tok.line, tok.col) from None
        return Literal(value)


def parse_turtle(
    text: str,
    base: str | None = None,
    allocator: BlankNodeAllocator | None = None,
    prefixes: dict[str, str] | None = None,
) -> list[Triple]:
    """Parse Turtle text into triples.

    Blank nodes get fresh labels from `allocator` (a new scope when omitted).
    `prefixes` pre-binds prefix names in addition to any @prefix directives.
    """
    parser = _Parser(_tokenize(text), base, allocator)
    if prefixes:
        parser.prefixes.update(prefixes)
    return parser.parse()


# serialization -----------------------------------------------------

_PN_LOCAL_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_\-.]*$|^$")


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _compact(iri: str, prefixes: list[tuple[str, str]]) -> str:
    for name, base in prefixes:
        if iri.startswith(base):
            local = iri[len(base):]
            if _PN_LOCAL_RE.match(local) and not local.endswith("."):
                return f"{name}:{local}"
    return f"<{iri}>"


def serialize_turtle(triples, prefix_table: dict[str, str] | None = None) -> str:
    """Deterministic Turtle text: sorted prefixes, sorted statements,
    blank nodes renumbered in order of first appearance."""
    prefix_table = dict(prefix_table or {})
    prefixes = sorted(prefix_table.items())
    lines = [f"@prefix {name}: <{base}> ." for name, base in prefixes]
    if lines:
        lines.append("")

    ordered = sorted(set(triples), key=Triple.sort_key)
    relabel: dict[str, str] = {}

    def render(term: Term) -> str:
        if isinstance(term, Iri):
            if term.value == RDF_NS + "type":
                return "a"
            return _compact(term.value, prefixes)
        if isinstance(term, BlankNode):
            if term.label not in relabel:
                relabel[term.label] = f"b{len(relabel)}"
            return f"_:{relabel[term.label]}"
        lit: Literal = term
        if lit.language:
            return f'"{_escape(lit.lexical)}"@{lit.language}'
        if lit.datatype.value == XSD_STRING:
            return f'"{_escape(lit.lexical)}"'
        return f'"{_escape(lit.lexical)}"^^{_compact(lit.datatype.value, prefixes)}'

    for t in ordered:
        subj = render(t.subject)
        pred = render(t.predicate) if t.predicate.value != RDF_NS + "type" else "a"
        lines.append(f"{subj} {pred} {render(t.object)} .")
    return "\n".join(lines) + "\n"

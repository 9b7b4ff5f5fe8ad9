"""Raw-file semantification pipeline: parse CSV/grid/JSON, resolve keys
against a mapping file, emit a flat or template-expanded graph, and store
time series in a columnar container referenced from the graph."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from urllib.parse import unquote

import numpy as np

from . import ns
from .container import Column, ColumnContainer, write_container
from .kitems import KItemStore
from .rdf import (
    BlankNode,
    BlankNodeAllocator,
    Iri,
    Literal,
    Term,
    Triple,
    parse_turtle,
    serialize_turtle,
    string_literal,
)
from .rdf.terms import XSD_DOUBLE, XSD_INTEGER
from .units import Unit, UnitTable, DEFAULT_UNITS
from .vocabulary import media_type_concept, mint_iri, slug


class IngestError(ValueError):
    pass


# mapping files -------------------------------------------------------


@dataclass(frozen=True)
class MappingEntry:
    key: str
    iri: Iri
    annotation: str | None = None


@dataclass
class MappingFile:
    entries: dict[str, MappingEntry]
    format: str  # "structured" | "two-column"

    def get(self, key: str) -> MappingEntry | None:
        return self.entries.get(key)


def parse_mapping(data: bytes, format: str) -> MappingFile:
    text = data.decode("utf-8-sig")
    entries: dict[str, MappingEntry] = {}
    if format == "structured":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"malformed mapping JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise IngestError("structured mapping must be a JSON object")
        for key, body in doc.items():
            if not isinstance(body, dict) or "iri" not in body:
                raise IngestError(f"mapping entry {key!r} lacks an iri")
            annotation = body.get("annotation") or None
            entries[key] = MappingEntry(key, Iri(body["iri"]), annotation)
    elif format == "two-column":
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise IngestError(f"mapping line {lineno}: expected key<TAB>iri")
            key, iri = parts[0].strip(), parts[1].strip()
            if key in entries:
                raise IngestError(f"duplicate mapping key {key!r}")
            entries[key] = MappingEntry(key, Iri(iri), None)
    else:
        raise IngestError(f"unknown mapping format {format!r}")
    if format == "structured" and len(entries) != len(set(entries)):
        raise IngestError("duplicate mapping keys")
    return MappingFile(entries, format)


# configs and raw records ----------------------------------------------


@dataclass
class IngestConfig:
    format: str  # "csv" | "grid" | "json"
    # csv dialect
    delimiter: str = ","
    quote: str = '"'
    decimal_separator: str = "."
    header_rows: int = 0
    metadata_rows: int | None = None
    expect_table: bool = False
    # grid locations
    metadata_cells: dict[str, str] = field(default_factory=dict)
    table_range: str | None = None
    # json paths
    metadata_paths: dict[str, str] = field(default_factory=dict)
    column_paths: dict[str, str] = field(default_factory=dict)
    # shared
    template: str | None = None
    context_annotation: str | None = None
    column_units: dict[str, str] = field(default_factory=dict)
    strict: bool = False

    @classmethod
    def from_dict(cls, doc: dict) -> "IngestConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise IngestError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class RawRecord:
    metadata: list[tuple[str, str, str | None]] = field(default_factory=list)
    columns: list[tuple[str, np.ndarray]] = field(default_factory=list)

    def __post_init__(self):
        lengths = {len(v) for _, v in self.columns}
        if len(lengths) > 1:
            raise IngestError("column arrays differ in length")


@dataclass
class MetadataRecord:
    key: str
    concept: Iri
    value: str | int | float
    lexical: str
    datatype: Iri | None  # None = plain string
    unit: Unit | None = None
    term_value: Iri | None = None
    original_unit: str | None = None


# parsers --------------------------------------------------------------


def _decode_lines(data: bytes) -> list[str]:
    # CRLF and LF inputs must produce identical records
    return data.decode("utf-8-sig").splitlines()


def parse_csv(data: bytes, config: IngestConfig) -> RawRecord:
    lines = _decode_lines(data)[config.header_rows:]

    if config.metadata_rows is not None:
        meta_lines = lines[: config.metadata_rows]
        table_lines = [l for l in lines[config.metadata_rows:] if l.strip()]
    else:
        boundary = next((i for i, l in enumerate(lines) if not l.strip()), None)
        if boundary is None:
            if config.expect_table:
                raise IngestError("metadata/table boundary not found")
            meta_lines, table_lines = lines, []
        else:
            meta_lines = lines[:boundary]
            table_lines = [l for l in lines[boundary:] if l.strip()]
    if config.expect_table and not table_lines:
        raise IngestError("expected a column table, found none")

    reader = csv.reader(
        meta_lines, delimiter=config.delimiter, quotechar=config.quote
    )
    metadata = []
    seen = set()
    for row in reader:
        row = [cell for cell in row]
        if not row or not any(cell.strip() for cell in row):
            continue
        key = row[0]
        if key in seen:
            raise IngestError(f"duplicate metadata key {key!r}")
        seen.add(key)
        value = row[1] if len(row) > 1 else ""
        unit = row[2] if len(row) > 2 and row[2].strip() else None
        metadata.append((key, value, unit))

    columns: list[tuple[str, np.ndarray]] = []
    if table_lines:
        table = list(
            csv.reader(table_lines, delimiter=config.delimiter, quotechar=config.quote)
        )
        names = [c for c in table[0] if c.strip()]
        data_rows = table[1:]
        values = [[] for _ in names]
        for rowno, row in enumerate(data_rows, start=2):
            cells = row[: len(names)] if len(row) > len(names) and not any(
                c.strip() for c in row[len(names):]
            ) else row
            if len(cells) != len(names):
                raise IngestError(f"table row {rowno} has {len(cells)} cells, expected {len(names)}")
            for i, cell in enumerate(cells):
                try:
                    values[i].append(_parse_float(cell, config.decimal_separator))
                except ValueError:
                    raise IngestError(
                        f"non-numeric cell {cell!r} in column {names[i]!r}"
                    ) from None
        columns = [(name, np.asarray(vals, dtype="<f8")) for name, vals in zip(names, values)]
    return RawRecord(metadata, columns)


def _parse_float(text: str, decimal_separator: str) -> float:
    return float(_normalize_number(text, decimal_separator))


def _normalize_number(text: str, decimal_separator: str) -> str:
    text = text.strip()
    if decimal_separator != ".":
        text = text.replace(decimal_separator, ".")
    return text


_CELL_RE = re.compile(r"^([A-Za-z]+)([0-9]+)$")


def _cell_address(address: str) -> tuple[int, int]:
    m = _CELL_RE.match(address)
    if m is None:
        raise IngestError(f"bad cell address {address!r}")
    col = 0
    for ch in m.group(1).upper():
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return int(m.group(2)) - 1, col - 1  # (row, col), zero-based


def parse_grid(cells: list[list[str]], config: IngestConfig) -> RawRecord:
    """Grid = CSV-rendered matrix; metadata from addressed cells, table
    from a rectangular range whose first row holds column names."""

    def cell(address: str) -> str:
        row, col = _cell_address(address)
        if row >= len(cells) or col >= len(cells[row]):
            raise IngestError(f"cell address {address} is out of bounds")
        return cells[row][col]

    metadata = []
    for key, address in config.metadata_cells.items():
        value = cell(address)
        if not value.strip():
            raise IngestError(f"mandatory cell {address} ({key!r}) is empty")
        metadata.append((key, value, None))

    columns: list[tuple[str, np.ndarray]] = []
    if config.table_range:
        try:
            start, end = config.table_range.split(":")
        except ValueError:
            raise IngestError(f"bad table range {config.table_range!r}") from None
        r0, c0 = _cell_address(start)
        r1, c1 = _cell_address(end)
        names = [cell_at(cells, r0, c) for c in range(c0, c1 + 1)]
        values = [[] for _ in names]
        for r in range(r0 + 1, r1 + 1):
            for i, c in enumerate(range(c0, c1 + 1)):
                raw = cell_at(cells, r, c)
                try:
                    values[i].append(_parse_float(raw, config.decimal_separator))
                except ValueError:
                    raise IngestError(
                        f"non-numeric cell {raw!r} in table column {names[i]!r}"
                    ) from None
        columns = [(n, np.asarray(v, dtype="<f8")) for n, v in zip(names, values)]
    return RawRecord(metadata, columns)


def cell_at(cells: list[list[str]], row: int, col: int) -> str:
    if row >= len(cells) or col >= len(cells[row]):
        raise IngestError(f"grid position ({row + 1}, {col + 1}) is out of bounds")
    return cells[row][col]


_PATH_TOKEN = re.compile(r"\.([A-Za-z_][A-Za-z0-9_ \-]*)|\[(\d+)\]|\[(\*)\]")


def _jsonpath(doc, path: str) -> list:
    if not path.startswith("$"):
        raise IngestError(f"JSONPath must start with $: {path!r}")
    nodes = [doc]
    pos = 1
    while pos < len(path):
        m = _PATH_TOKEN.match(path, pos)
        if m is None:
            raise IngestError(f"bad JSONPath step at {path[pos:]!r}")
        name, index, star = m.groups()
        next_nodes = []
        for node in nodes:
            if name is not None:
                if isinstance(node, dict) and name in node:
                    next_nodes.append(node[name])
            elif index is not None:
                if isinstance(node, list) and int(index) < len(node):
                    next_nodes.append(node[int(index)])
            elif star is not None:
                if isinstance(node, list):
                    next_nodes.extend(node)
        nodes = next_nodes
        pos = m.end()
    return nodes


def parse_json(data: bytes, config: IngestConfig) -> RawRecord:
    try:
        doc = json.loads(data.decode("utf-8-sig"))
    except json.JSONDecodeError as exc:
        raise IngestError(f"malformed JSON: {exc}") from None

    metadata = []
    for key, path in config.metadata_paths.items():
        nodes = _jsonpath(doc, path)
        if len(nodes) != 1 or isinstance(nodes[0], (dict, list)):
            raise IngestError(f"path {path!r} must select exactly one scalar")
        value = nodes[0]
        metadata.append((key, value if isinstance(value, str) else json.dumps(value), None))

    columns = []
    for name, path in config.column_paths.items():
        nodes = _jsonpath(doc, path)
        if len(nodes) == 1 and isinstance(nodes[0], list):
            nodes = nodes[0]
        if not nodes:
            raise IngestError(f"path {path!r} selected nothing")
        try:
            array = np.asarray([float(x) for x in nodes], dtype="<f8")
        except (TypeError, ValueError):
            raise IngestError(f"path {path!r} selected non-numeric elements") from None
        columns.append((name, array))
    return RawRecord(metadata, columns)


def parse_raw(data: bytes, config: IngestConfig) -> RawRecord:
    if config.format == "csv":
        return parse_csv(data, config)
    if config.format == "grid":
        lines = _decode_lines(data)
        cells = list(csv.reader(lines, delimiter=config.delimiter, quotechar=config.quote))
        return parse_grid(cells, config)
    if config.format == "json":
        return parse_json(data, config)
    raise IngestError(f"unknown ingest format {config.format!r}")


# resolution ------------------------------------------------------------


def resolve(
    raw: RawRecord,
    mapping: MappingFile,
    unit_table: UnitTable = DEFAULT_UNITS,
    strict: bool = False,
    decimal_separator: str = ".",
) -> tuple[list[MetadataRecord], list[str]]:
    records = []
    unmapped = []
    for key, value_text, unit_text in raw.metadata:
        entry = mapping.get(key)
        if entry is None:
            unmapped.append(key)
            continue
        if not value_text.strip():
            continue  # empty values are skipped, not semantified
        unit = unit_table.resolve(unit_text) if unit_text else None
        lexical, datatype, value = _type_value(value_text, unit is not None, decimal_separator)
        term_value = None
        if entry.annotation:
            term_value = mint_iri(entry.annotation, value_text)
        records.append(
            MetadataRecord(
                key=key,
                concept=entry.iri,
                value=value,
                lexical=lexical,
                datatype=datatype,
                unit=unit,
                term_value=term_value,
                original_unit=unit_text,
            )
        )
    if strict and unmapped:
        raise IngestError(f"unmapped keys in strict mode: {unmapped}")
    return records, unmapped


_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _type_value(text: str, has_unit: bool, decimal_separator: str = "."):
    """Returns (lexical, datatype, python value). Quantities (unit present)
    are doubles even when the lexical form is integral."""
    norm = _normalize_number(text, decimal_separator)
    if _INT_RE.match(norm):
        if has_unit:
            return norm, Iri(XSD_DOUBLE), float(norm)
        return norm, Iri(XSD_INTEGER), int(norm)
    if _FLOAT_RE.match(norm):
        return norm, Iri(XSD_DOUBLE), float(norm)
    return text, None, text


# graph building ---------------------------------------------------------


def _record_literal(record: MetadataRecord) -> Literal:
    if record.datatype is None:
        return string_literal(record.lexical)
    return Literal(record.lexical, record.datatype)


def build_flat_graph(
    kitem_iri: Iri,
    item_id: str,
    records: list[MetadataRecord],
    columns: list[Column],
    allocator: BlankNodeAllocator,
    origin: Iri = ns.DSMS_ORIGIN_INGEST,
) -> tuple[list[Triple], dict[str, BlankNode]]:
    triples: list[Triple] = []
    node_map: dict[str, BlankNode] = {}
    for record in records:
        node = allocator.fresh()
        node_map[record.key] = node
        triples.append(Triple(kitem_iri, ns.DSMS_HAS_METADATUM, node))
        triples.append(Triple(node, ns.A, record.concept))
        triples.append(Triple(node, ns.DSMS_VALUE, _record_literal(record)))
        triples.append(Triple(node, ns.DSMS_ORIGINAL_KEY, string_literal(record.key)))
        triples.append(Triple(node, ns.DSMS_ORIGIN, origin))
        if record.unit is not None:
            triples.append(Triple(node, ns.QUDT_UNIT_PRED, record.unit.iri))
        if record.term_value is not None:
            triples.append(Triple(node, ns.DSMS_TERM_VALUE, record.term_value))
    for column in columns:
        node = allocator.fresh()
        triples.append(Triple(kitem_iri, ns.DSMS_HAS_COLUMN, node))
        if column.concept is not None:
            triples.append(Triple(node, ns.A, column.concept))
        triples.append(Triple(node, ns.DSMS_COLUMN_NAME, string_literal(column.name)))
        triples.append(
            Triple(
                node,
                ns.DSMS_ACCESS_URL,
                string_literal(f"container://{item_id}/{column.name}"),
            )
        )
        triples.append(Triple(node, ns.DSMS_ORIGIN, origin))
        if column.unit is not None:
            triples.append(Triple(node, ns.QUDT_UNIT_PRED, column.unit))
    return triples, node_map


_LITERAL_PLACEHOLDER = re.compile(r"^\{\{(.+)\}\}$")


def apply_template(
    template_triples: list[Triple],
    records: list[MetadataRecord],
    node_map: dict[str, BlankNode],
    kitem_iri: Iri,
) -> list[Triple]:
    by_key = {r.key: r for r in records}

    def substitute(term: Term, position: str) -> Term:
        if isinstance(term, Iri) and term.value.startswith(ns.DSMS_PLACEHOLDER):
            key = unquote(term.value[len(ns.DSMS_PLACEHOLDER):])
            if key == "__item__":
                return kitem_iri
            if key not in node_map:
                raise IngestError(f"template placeholder {key!r} matches no record")
            if position == "predicate":
                raise IngestError(f"placeholder {key!r} cannot stand for a predicate")
            return node_map[key]
        if isinstance(term, Literal):
            m = _LITERAL_PLACEHOLDER.match(term.lexical)
            if m:
                key = m.group(1)
                if key not in by_key:
                    raise IngestError(f"template placeholder {key!r} matches no record")
                return _record_literal(by_key[key])
        return term

    out = []
    for t in template_triples:
        subject = substitute(t.subject, "subject")
        predicate = substitute(t.predicate, "predicate")
        obj = substitute(t.object, "object")
        out.append(Triple(subject, predicate, obj))
    return out


# orchestration -----------------------------------------------------------


@dataclass
class IngestReport:
    item_id: str
    level: int | str
    metadata_count: int
    triples_written: int
    unmapped_keys: list[str]
    columns: list[str]


def ingest_file(
    kitems: KItemStore,
    item_id: str,
    filename: str,
    mapping: MappingFile,
    config: IngestConfig,
    unit_table: UnitTable = DEFAULT_UNITS,
    on_ingested=None,
) -> IngestReport:
    """Parse -> resolve -> container -> graph, all-or-nothing: nothing is
    committed to the item until every stage has succeeded."""
    item = kitems.get(item_id)
    attachment = kitems.get_attachment(item_id, filename)

    # stage everything before touching the item
    raw = parse_raw(attachment.data, config)
    records, unmapped = resolve(
        raw, mapping, unit_table, config.strict, config.decimal_separator
    )

    columns = []
    for name, values in raw.columns:
        entry = mapping.get(name)
        unit_iri = None
        if name in config.column_units:
            unit_iri = unit_table.resolve(config.column_units[name]).iri
        columns.append(
            Column(name, values, concept=entry.iri if entry else None, unit=unit_iri)
        )
    container = ColumnContainer(columns) if columns else None

    triples, node_map = build_flat_graph(
        item.iri, item.id, records, columns, kitems.store.allocator
    )
    if config.template:
        template_triples = parse_turtle(
            config.template, allocator=kitems.store.allocator, prefixes=ns.PREFIXES
        )
        triples.extend(apply_template(template_triples, records, node_map, item.iri))

    context = Iri(config.context_annotation) if config.context_annotation else None
    if context is not None and not kitems.vocabulary.has(context):
        raise IngestError(f"context annotation {context.value} is not registered")
    file_type = media_type_concept(attachment.media_type)
    if not kitems.vocabulary.has(file_type):
        kitems.vocabulary.register_term(ns.DSMS_MEDIA, attachment.media_type)
    for record in records:
        _ensure_concept(kitems.vocabulary, record.concept, record.key)
        if record.term_value is not None:
            _ensure_concept(kitems.vocabulary, record.term_value, str(record.value))
    for column in columns:
        if column.concept is not None:
            _ensure_concept(kitems.vocabulary, column.concept, column.name)

    derived_name = filename.rsplit(".", 1)[0] + ".ttl"

    # commit
    _retract_ingest_origin(kitems, item)
    inserted = kitems.store.insert(item.graph_iri, triples)
    kitems.set_container(item_id, container)
    kitems.annotate(item_id, file_type)
    if context is not None:
        kitems.annotate(item_id, context)
    turtle_text = serialize_turtle(
        kitems.store.graph(item.graph_iri), kitems.store.prefixes
    )
    kitems.attach(
        item_id,
        derived_name,
        turtle_text.encode("utf-8"),
        media_type="text/turtle",
        derived=True,
        replace=True,
    )
    if on_ingested is not None:
        on_ingested(item, filename, derived_name)

    return IngestReport(
        item_id=item_id,
        level=kitems.integration_level(item_id),
        metadata_count=len(records),
        triples_written=inserted,
        unmapped_keys=unmapped,
        columns=[c.name for c in columns],
    )


def _ensure_concept(vocabulary, iri: Iri, fallback_label: str):
    """Mapping files reference ontology concepts directly; make them known
    to the local vocabulary so classification and search can use them."""
    if vocabulary.has(iri):
        return
    namespace, _, local = iri.value.rpartition("#" if "#" in iri.value else "/")
    label = local if slug(local) == local else fallback_label
    if not namespace or not label:
        return
    if mint_iri(namespace, label).value == iri.value:
        vocabulary.register_term(namespace, label)


def _retract_ingest_origin(kitems: KItemStore, item):
    """Remove metadatum/column nodes of ingest origin plus every triple
    touching them, so re-ingest is idempotent up to blank node labels."""
    graph = kitems.store.graph(item.graph_iri)
    nodes = {
        t.subject
        for t in graph
        if t.predicate == ns.DSMS_ORIGIN and t.object == ns.DSMS_ORIGIN_INGEST
    }
    if not nodes:
        return
    stale = [t for t in graph if t.subject in nodes or t.object in nodes]
    kitems.store.remove(item.graph_iri, stale)


def container_bytes(item) -> bytes:
    if item.container is None:
        raise IngestError(f"k-item {item.id} has no container")
    return write_container(item.container)

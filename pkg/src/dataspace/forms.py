"""Form schemas per k-type and transformation of submissions into RDF,
using the same metadatum-node shape as file ingest."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ns
from .ingest import MetadataRecord, build_flat_graph
from .kitems import KItemStore
from .rdf import Iri, Triple, integer_literal
from .rdf.terms import XSD_BOOLEAN, XSD_DOUBLE, XSD_INTEGER, Literal
from .units import UnitTable, DEFAULT_UNITS
from .vocabulary import VocabularyRegistry

KINDS = ("text", "number", "quantity", "term-ref", "boolean")


class FormError(ValueError):
    pass


@dataclass
class FormField:
    key: str
    label: str
    concept: Iri
    kind: str
    unit: Iri | None = None
    required: bool = False
    options: list[Iri] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FormError(f"unknown field kind {self.kind!r}")
        if self.kind == "quantity" and self.unit is None:
            raise FormError(f"quantity field {self.key!r} needs a unit")
        if self.kind != "quantity" and self.unit is not None:
            raise FormError(f"field {self.key!r} of kind {self.kind} cannot carry a unit")

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "label": self.label,
            "concept": self.concept.value,
            "kind": self.kind,
            "unit": self.unit.value if self.unit else None,
            "required": self.required,
            "options": [o.value for o in self.options],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FormField":
        return cls(
            key=doc["key"],
            label=doc.get("label", doc["key"]),
            concept=Iri(doc["concept"]),
            kind=doc["kind"],
            unit=Iri(doc["unit"]) if doc.get("unit") else None,
            required=bool(doc.get("required", False)),
            options=[Iri(o) for o in doc.get("options", [])],
        )


@dataclass
class FormSchema:
    ktype: str
    fields: list[FormField]
    version: int = 1

    def __post_init__(self):
        keys = [f.key for f in self.fields]
        if len(keys) != len(set(keys)):
            raise FormError("duplicate field keys")

    def field_map(self) -> dict[str, FormField]:
        return {f.key: f for f in self.fields}

    def to_dict(self) -> dict:
        return {
            "ktype": self.ktype,
            "version": self.version,
            "fields": [f.to_dict() for f in self.fields],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FormSchema":
        return cls(
            ktype=doc["ktype"],
            fields=[FormField.from_dict(f) for f in doc.get("fields", [])],
            version=int(doc.get("version", 1)),
        )


class FormRegistry:
    """Current schema per k-type; superseded versions are kept for audit."""

    def __init__(self, vocabulary: VocabularyRegistry):
        self.vocabulary = vocabulary
        self.schemas: dict[str, FormSchema] = {}
        self.history: dict[str, list[FormSchema]] = {}

    def attach_form(self, kitems: KItemStore, ktype_id: str, schema: FormSchema) -> FormSchema:
        kitems.get_ktype(ktype_id)
        for f in schema.fields:
            if not self.vocabulary.has(f.concept):
                raise FormError(f"field {f.key!r}: concept {f.concept.value} not registered")
            for option in f.options:
                if not self.vocabulary.has(option):
                    raise FormError(f"field {f.key!r}: option {option.value} not registered")
        previous = self.schemas.get(ktype_id)
        schema.ktype = ktype_id
        schema.version = previous.version + 1 if previous else 1
        if previous:
            self.history.setdefault(ktype_id, []).append(previous)
        self.schemas[ktype_id] = schema
        return schema

    def get(self, ktype_id: str) -> FormSchema:
        try:
            return self.schemas[ktype_id]
        except KeyError:
            raise FormError(f"no form schema for k-type {ktype_id!r}") from None


def validate(schema: FormSchema, values: dict) -> list[str]:
    """Returns violations; empty list means the submission is acceptable."""
    violations = []
    fields = schema.field_map()
    for key in values:
        if key not in fields:
            violations.append(f"unknown field {key!r}")
    for f in schema.fields:
        if f.key not in values or values[f.key] in (None, ""):
            if f.required:
                violations.append(f"missing required field {f.key!r}")
            continue
        value = values[f.key]
        if f.kind in ("number", "quantity"):
            try:
                float(value)
            except (TypeError, ValueError):
                violations.append(f"field {f.key!r}: {value!r} is not a number")
        elif f.kind == "boolean":
            if not isinstance(value, bool) and value not in ("true", "false"):
                violations.append(f"field {f.key!r}: {value!r} is not a boolean")
        elif f.kind == "term-ref":
            if str(value) not in [o.value for o in f.options]:
                violations.append(f"field {f.key!r}: {value!r} not among options")
    return violations


def _field_record(f: FormField, value, unit_table: UnitTable) -> MetadataRecord:
    unit = None
    term_value = None
    if f.kind == "quantity":
        unit = unit_table.by_iri(f.unit)
        lexical, datatype, typed = repr(float(value)), Iri(XSD_DOUBLE), float(value)
    elif f.kind == "number":
        if isinstance(value, bool):
            raise FormError(f"field {f.key!r}: boolean given for a number")
        if isinstance(value, int) or (isinstance(value, str) and value.lstrip("+-").isdigit()):
            lexical, datatype, typed = str(int(value)), Iri(XSD_INTEGER), int(value)
        else:
            lexical, datatype, typed = repr(float(value)), Iri(XSD_DOUBLE), float(value)
    elif f.kind == "boolean":
        flag = value if isinstance(value, bool) else value == "true"
        lexical, datatype, typed = ("true" if flag else "false"), Iri(XSD_BOOLEAN), flag
    elif f.kind == "term-ref":
        term_value = Iri(str(value))
        lexical, datatype, typed = str(value), None, str(value)
    else:
        lexical, datatype, typed = str(value), None, str(value)
    return MetadataRecord(
        key=f.key,
        concept=f.concept,
        value=typed,
        lexical=lexical,
        datatype=datatype,
        unit=unit,
        term_value=term_value,
    )


def submit(
    kitems: KItemStore,
    item_id: str,
    schema: FormSchema,
    values: dict,
    unit_table: UnitTable = DEFAULT_UNITS,
) -> int:
    """Write the submission as form-origin metadatum nodes, replacing any
    prior form-origin nodes of the same schema version."""
    item = kitems.get(item_id)
    violations = validate(schema, values)
    if violations:
        raise FormError("; ".join(violations))

    records = [
        _field_record(f, values[f.key], unit_table)
        for f in schema.fields
        if f.key in values and values[f.key] not in (None, "")
    ]
    triples, node_map = build_flat_graph(
        item.iri,
        item.id,
        records,
        [],
        kitems.store.allocator,
        origin=ns.DSMS_ORIGIN_FORM,
    )
    version_lit = integer_literal(schema.version)
    for node in node_map.values():
        triples.append(Triple(node, ns.DSMS_FORM_VERSION, version_lit))

    _retract_form_origin(kitems, item, schema.version)
    count = kitems.store.insert(item.graph_iri, triples)
    item.updated = kitems._clock()
    for fn in kitems.on_change:
        fn(item)
    return count


def _retract_form_origin(kitems: KItemStore, item, version: int):
    graph = kitems.store.graph(item.graph_iri)
    form_nodes = {
        t.subject
        for t in graph
        if t.predicate == ns.DSMS_ORIGIN and t.object == ns.DSMS_ORIGIN_FORM
    }
    versioned = {
        t.subject
        for t in graph
        if t.predicate == ns.DSMS_FORM_VERSION
        and isinstance(t.object, Literal)
        and t.object.lexical == str(version)
    }
    stale_nodes = form_nodes & versioned
    if not stale_nodes:
        return
    stale = [t for t in graph if t.subject in stale_nodes or t.object in stale_nodes]
    kitems.store.remove(item.graph_iri, stale)

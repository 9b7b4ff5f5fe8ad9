"""Semantic material cards: graph-encoded mechanical properties and model
parameters, provenance-linked to their source experiments, plus syntactic
export to solver-style key files."""

from __future__ import annotations

import numpy as np

from . import ns
from .ingest import MetadataRecord, build_flat_graph
from .kitems import KItem, KItemStore
from .provenance import ProvenanceLog
from .rdf import Iri, Literal, Triple, double_literal
from .rdf.terms import XSD_DOUBLE
from .tensile import (
    HockettSherbyParams,
    MechanicalProperties,
    SpecimenGeometry,
    TensileError,
    derive_curve,
    evaluate_curve,
    hockett_sherby,
)
from .units import DEFAULT_UNITS, UnitTable, convert_unit

MATERIAL_CARD_KTYPE = "material-card"

E_CONCEPT = Iri(ns.STEEL + "YoungsModulus")
RP02_CONCEPT = Iri(ns.STEEL + "YieldStrength")
RM_CONCEPT = Iri(ns.STEEL + "TensileStrength")
AG_CONCEPT = Iri(ns.STEEL + "UniformElongation")

GAUGE_LENGTH_CONCEPT = Iri(ns.STEEL + "OriginalGaugeLength")
THICKNESS_CONCEPT = Iri(ns.STEEL + "SpecimenThickness")
WIDTH_CONCEPT = Iri(ns.STEEL + "SpecimenWidth")

TEMPLATES = ("hs-analytic", "tabulated-plasticity")


class CardError(ValueError):
    pass


def _mpa(unit_table: UnitTable):
    return unit_table.resolve("MPa")


def _property_records(
    props: MechanicalProperties, unit_table: UnitTable
) -> list[MetadataRecord]:
    mpa = _mpa(unit_table)

    def record(key, concept, value, unit):
        return MetadataRecord(
            key=key,
            concept=concept,
            value=float(value),
            lexical=repr(float(value)),
            datatype=Iri(XSD_DOUBLE),
            unit=unit,
        )

    return [
        record("E", E_CONCEPT, props.E, mpa),
        record("Rp02", RP02_CONCEPT, props.Rp02, mpa),
        record("Rm", RM_CONCEPT, props.Rm, mpa),
        record("Ag", AG_CONCEPT, props.Ag, None),
    ]


def build_semantic_card(
    kitems: KItemStore,
    provenance: ProvenanceLog,
    props: MechanicalProperties,
    hs: HockettSherbyParams | None,
    source_ids: list[str],
    card_id: str | None = None,
    name: str | None = None,
    eps_p_max: float | None = None,
    unit_table: UnitTable = DEFAULT_UNITS,
    record_provenance: bool = True,
) -> KItem:
    """New material-card k-item holding the properties as metadatum nodes
    and, when a fit is available, a named model block."""
    sources = [kitems.get(i) for i in source_ids]
    if not sources:
        raise CardError("a card needs at least one source k-item")
    card_id = card_id or f"{sources[0].id}-card"
    name = name or f"{sources[0].name} material card"
    card = kitems.create_kitem(MATERIAL_CARD_KTYPE, name, item_id=card_id)

    records = _property_records(props, unit_table)
    triples, _ = build_flat_graph(
        card.iri, card.id, records, [], kitems.store.allocator, origin=ns.DSMS_ORIGIN_APP
    )
    if hs is not None:
        model = Iri(f"{card.iri.value}/model/hockett-sherby")
        triples.extend(
            [
                Triple(card.iri, ns.DSMS_HAS_MODEL, model),
                Triple(model, ns.A, ns.DSMS_HOCKETT_SHERBY),
                Triple(model, ns.DSMS_SIGMA_INITIAL, double_literal(hs.sigma_i)),
                Triple(model, ns.DSMS_SIGMA_SATURATION, double_literal(hs.sigma_sat)),
                Triple(model, ns.DSMS_HARDENING_RATE, double_literal(hs.a)),
                Triple(model, ns.DSMS_HARDENING_EXPONENT, double_literal(hs.p)),
                Triple(model, ns.DSMS_RMS_RESIDUAL, double_literal(hs.rms_residual)),
                Triple(
                    model,
                    ns.DSMS_PLASTIC_STRAIN_MAX,
                    double_literal(eps_p_max if eps_p_max is not None else 0.2),
                ),
            ]
        )
    kitems.store.insert(card.graph_iri, triples)
    kitems._changed(card)

    if record_provenance:
        provenance.record_activity(
            Iri(f"dsms://activity/card/{card.id}"),
            used=[s.iri for s in sources],
            generated=[card.iri],
            label=f"material card for {sources[0].name}",
        )
        for source in sources:
            kitems.link_kitems(source.id, card.id, ns.DSMS_IS_INPUT_FOR)
    return card


# reading a card back ------------------------------------------------------


def _double(graph, subject, predicate) -> float | None:
    for t in graph:
        if t.subject == subject and t.predicate == predicate and isinstance(t.object, Literal):
            return float(t.object.lexical)
    return None


def read_card(kitems: KItemStore, card_id: str) -> dict:
    """Properties and model parameters as plain floats, straight from the
    card's graph."""
    card = kitems.get(card_id)
    graph = kitems.store.graph(card.graph_iri)
    metadatum_nodes = {
        t.object: None
        for t in graph
        if t.subject == card.iri and t.predicate == ns.DSMS_HAS_METADATUM
    }
    by_concept = {}
    for node in metadatum_nodes:
        concept = next(
            (t.object for t in graph if t.subject == node and t.predicate == ns.A), None
        )
        value = _double(graph, node, ns.DSMS_VALUE)
        if concept is not None and value is not None:
            by_concept[concept] = value
    doc = {
        "E": by_concept.get(E_CONCEPT),
        "Rp02": by_concept.get(RP02_CONCEPT),
        "Rm": by_concept.get(RM_CONCEPT),
        "Ag": by_concept.get(AG_CONCEPT),
        "model": None,
    }
    model = next(
        (t.object for t in graph if t.subject == card.iri and t.predicate == ns.DSMS_HAS_MODEL),
        None,
    )
    if model is not None:
        doc["model"] = {
            "sigma_i": _double(graph, model, ns.DSMS_SIGMA_INITIAL),
            "sigma_sat": _double(graph, model, ns.DSMS_SIGMA_SATURATION),
            "a": _double(graph, model, ns.DSMS_HARDENING_RATE),
            "p": _double(graph, model, ns.DSMS_HARDENING_EXPONENT),
            "eps_p_max": _double(graph, model, ns.DSMS_PLASTIC_STRAIN_MAX),
        }
    return doc


# export -------------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def render_card(doc: dict, name: str, template: str) -> str:
    if template not in TEMPLATES:
        raise CardError(f"unknown template {template!r}")
    if doc["E"] is None:
        raise CardError("card lacks an elastic block")
    lines = [f"*MATERIAL, NAME={name}"]
    # 0.3 is an assumed Poisson ratio: not measurable from a uniaxial test
    lines.append("** Poisson ratio 0.3 is an assumption, not a fitted value")
    lines.append("*ELASTIC")
    lines.append(f"{_fmt(doc['E'])}, 0.3")
    model = doc.get("model")
    if template == "hs-analytic":
        if model is None:
            raise CardError("template hs-analytic requires a model block")
        lines.append("*HOCKETT_SHERBY")
        lines.append(
            f"{_fmt(model['sigma_i'])}, {_fmt(model['sigma_sat'])}, "
            f"{_fmt(model['a'])}, {_fmt(model['p'])}"
        )
    else:
        if model is None:
            raise CardError("template tabulated-plasticity requires a model block")
        eps_p_max = model["eps_p_max"] or 0.2
        eps = np.linspace(1e-4, eps_p_max, 50)
        sigma = hockett_sherby(
            eps, model["sigma_i"], model["sigma_sat"], model["a"], model["p"]
        )
        lines.append("*PLASTIC")
        for s, e in zip(sigma, eps):
            lines.append(f"{_fmt(float(s))}, {_fmt(float(e))}")
    return "\n".join(lines) + "\n"


def export_card(
    kitems: KItemStore,
    provenance: ProvenanceLog,
    card_id: str,
    template: str,
    ctx=None,
) -> str:
    """Render the card to a key file, attach it as a derived file and record
    the export in the provenance graph (via the surrounding run when there
    is one). Returns the attachment filename."""
    card = kitems.get(card_id)
    text = render_card(read_card(kitems, card_id), card.name, template)
    filename = f"{template}.key"
    kitems.attach(
        card_id,
        filename,
        text.encode("utf-8"),
        media_type="text/plain",
        derived=True,
        replace=True,
    )
    file_entity = ns.file_entity_iri(card_id, filename)
    if ctx is not None:
        ctx.generated_entities.append(file_entity)
        ctx.used_entities.append(card.iri)
    else:
        provenance.record_activity(
            Iri(f"dsms://activity/export/{card_id}/{template}"),
            used=[card.iri],
            generated=[file_entity],
            label=f"export {template}",
        )
    return filename


# app operations -------------------------------------------------------------


def _metadata_quantity(kitems: KItemStore, item: KItem, concept: Iri, target_unit: str,
                       unit_table: UnitTable) -> float:
    graph = kitems.store.graph(item.graph_iri)
    nodes = {
        t.object
        for t in graph
        if t.subject == item.iri and t.predicate == ns.DSMS_HAS_METADATUM
    }
    for node in nodes:
        typed = any(
            t.subject == node and t.predicate == ns.A and t.object == concept
            for t in graph
        )
        if not typed:
            continue
        value = _double(graph, node, ns.DSMS_VALUE)
        unit_iri = next(
            (t.object for t in graph if t.subject == node and t.predicate == ns.QUDT_UNIT_PRED),
            None,
        )
        if value is None:
            continue
        if unit_iri is None:
            return value
        unit = unit_table.by_iri(unit_iri)
        return convert_unit(value, unit, unit_table.resolve(target_unit))
    raise CardError(f"k-item {item.id} lacks a {concept.value} metadatum")


def _find_column(item: KItem, unit_symbols: tuple[str, ...], unit_table: UnitTable):
    if item.container is None:
        raise CardError(f"k-item {item.id} has no data container")
    wanted = {unit_table.resolve(s).iri for s in unit_symbols}
    for column in item.container.columns:
        if column.unit in wanted:
            return column
    raise CardError(
        f"k-item {item.id} has no column with unit in {', '.join(unit_symbols)}"
    )


def tensile_eval_operation(unit_table: UnitTable = DEFAULT_UNITS):
    """Built-in app operation: evaluate a tensile dataset and emit a card."""

    def operation(ctx, inputs: list[KItem]) -> list[KItem]:
        kitems: KItemStore = ctx.kitems
        source = inputs[0]
        settings = ctx.settings
        force = (
            source.container.column(settings["force_column"])
            if settings.get("force_column")
            else _find_column(source, ("N", "kN"), unit_table)
        )
        extension = (
            source.container.column(settings["extension_column"])
            if settings.get("extension_column")
            else _find_column(source, ("mm",), unit_table)
        )
        force_n = force.values
        if force.unit == unit_table.resolve("kN").iri:
            force_n = force_n * 1000.0
        geometry = SpecimenGeometry(
            gauge_length=_metadata_quantity(
                kitems, source, GAUGE_LENGTH_CONCEPT, "mm", unit_table
            ),
            thickness=_metadata_quantity(
                kitems, source, THICKNESS_CONCEPT, "mm", unit_table
            ),
            width=_metadata_quantity(kitems, source, WIDTH_CONCEPT, "mm", unit_table),
        )
        curve = derive_curve(force_n, extension.values, geometry)
        props, hs = evaluate_curve(curve)
        eps_p_max = None
        if hs is not None:
            from .tensile import to_true_plastic

            eps_p, _ = to_true_plastic(curve, props.E)
            eps_p_max = float(np.max(eps_p))
        ctx.log(
            f"E={props.E:.6g} MPa Rp02={props.Rp02:.6g} MPa Rm={props.Rm:.6g} MPa"
        )
        card = build_semantic_card(
            kitems,
            ctx.provenance,
            props,
            hs,
            [source.id],
            card_id=f"{ctx.run_id}-card",
            unit_table=unit_table,
            eps_p_max=eps_p_max,
            record_provenance=False,
        )
        report = _text_report(source, props, hs)
        kitems.attach(
            card.id, "report.txt", report.encode("utf-8"),
            media_type="text/plain", derived=True,
        )
        return [card]

    return operation


def _text_report(source: KItem, props: MechanicalProperties,
                 hs: HockettSherbyParams | None) -> str:
    lines = [
        f"Tensile evaluation of {source.name}",
        f"Young's modulus E: {_fmt(props.E)} MPa",
        f"Yield strength Rp0.2: {_fmt(props.Rp02)} MPa",
        f"Tensile strength Rm: {_fmt(props.Rm)} MPa",
        f"Uniform elongation Ag: {_fmt(props.Ag)}",
    ]
    if hs is not None:
        lines += [
            "Hockett-Sherby fit:",
            f"  sigma_i: {_fmt(hs.sigma_i)} MPa",
            f"  sigma_sat: {_fmt(hs.sigma_sat)} MPa",
            f"  a: {_fmt(hs.a)}",
            f"  p: {_fmt(hs.p)}",
            f"  rms residual: {_fmt(hs.rms_residual)} MPa",
        ]
    return "\n".join(lines) + "\n"


def card_export_operation(provenance: ProvenanceLog, template: str | None = None):
    """Built-in app operation: export a card k-item to a key file."""

    def operation(ctx, inputs: list[KItem]) -> list[KItem]:
        chosen = ctx.settings.get("template", template or "hs-analytic")
        for card in inputs:
            export_card(ctx.kitems, provenance, card.id, chosen, ctx=ctx)
        return []

    return operation

"""REST gateway exposing every module over HTTP. Errors are mapped to
machine-readable codes; stack traces never reach the client."""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .. import ns
from ..apps import AppError, AppSpec
from ..cards import CardError, export_card
from ..connectors import ConnectorError, ConnectorSpec
from ..container import ContainerError
from ..forms import FormError, FormSchema, submit as submit_form
from ..ingest import IngestError
from ..kitems import KItemError
from ..provenance import ProvenanceError
from ..rdf import QueryError, RdfError, TurtleSyntaxError
from ..space import Dataspace
from ..units import UnitError
from ..vocabulary import VocabularyError

__version__ = "0.1.0"

_ERROR_CODES = [
    (QueryError, 400, "query-error"),
    (TurtleSyntaxError, 400, "turtle-error"),
    (VocabularyError, 400, "vocabulary-error"),
    (UnitError, 400, "unit-error"),
    (IngestError, 400, "ingest-error"),
    (FormError, 400, "form-error"),
    (ContainerError, 400, "container-error"),
    (CardError, 400, "card-error"),
    (AppError, 400, "app-error"),
    (ConnectorError, 400, "connector-error"),
    (ProvenanceError, 400, "provenance-error"),
    (KItemError, 404, "kitem-error"),
    (RdfError, 400, "rdf-error"),
    # plain ValueErrors from argument validation map to a generic 400
    (ValueError, 400, "value-error"),
]


def _error_response(exc: Exception) -> JSONResponse:
    for etype, status, code in _ERROR_CODES:
        if isinstance(exc, etype):
            if "unknown" not in str(exc) and status == 404:
                status = 400
            return JSONResponse(
                status_code=status, content={"code": code, "message": str(exc)}
            )
    return JSONResponse(
        status_code=500, content={"code": "internal-error", "message": str(exc)}
    )


def _item_doc(space: Dataspace, item) -> dict:
    return {
        "id": item.id,
        "ktype": item.ktype,
        "name": item.name,
        "summary": item.summary,
        "annotations": [a.value for a in item.annotations],
        "links": [
            {"target": l.target, "relation": l.relation.value, "label": l.label}
            for l in item.links
        ],
        "attachments": [
            {
                "filename": a.filename,
                "media_type": a.media_type,
                "derived": a.derived,
                "checksum": a.checksum,
                "size": len(a.data),
            }
            for a in item.attachments.values()
        ],
        "columns": item.container.names() if item.container else [],
        "created": item.created,
        "updated": item.updated,
    }


def create_app(
    space: Dataspace | None = None,
    data_dir: Path | str | None = None,
    token: str | None = None,
) -> FastAPI:
    if space is None:
        space = Dataspace().seed()
    data_dir = Path(data_dir) if data_dir else None

    app = FastAPI(title="dataspace kernel", version=__version__)
    app.state.space = space

    def persist():
        if data_dir is not None:
            space.save(data_dir)

    @app.middleware("http")
    async def guard(request: Request, call_next):
        if token and request.method in ("POST", "PATCH", "PUT", "DELETE"):
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {token}":
                return JSONResponse(
                    status_code=401,
                    content={"code": "unauthorized", "message": "missing or bad token"},
                )
        try:
            return await call_next(request)
        except Exception as exc:  # noqa: BLE001 - mapped to stable codes
            return _error_response(exc)

    # health ------------------------------------------------------------
    @app.get("/health")
    def health():
        return {
            "version": __version__,
            "kitems": len(space.kitems.items),
            "ktypes": len(space.kitems.ktypes),
            "triples": len(space.store),
            "graphs": len(space.store.graph_names()),
        }

    # k-types -------------------------------------------------------------
    @app.get("/ktypes")
    def list_ktypes():
        return [
            {"id": k.id, "name": k.name, "description": k.description}
            for k in space.kitems.ktypes.values()
        ]

    @app.post("/ktypes", status_code=201)
    def create_ktype(body: dict):
        kt = space.kitems.add_ktype(
            body["id"], body.get("name", body["id"]), body.get("description", "")
        )
        persist()
        return {"id": kt.id, "name": kt.name, "description": kt.description}

    # k-items -------------------------------------------------------------
    @app.get("/kitems")
    def list_kitems():
        return [_item_doc(space, i) for i in space.kitems.items.values()]

    @app.post("/kitems", status_code=201)
    def create_kitem(body: dict):
        item = space.kitems.create_kitem(
            body["ktype"],
            body["name"],
            body.get("summary", ""),
            item_id=body.get("id"),
        )
        persist()
        return _item_doc(space, item)

    @app.get("/kitems/{item_id}")
    def get_kitem(item_id: str):
        return _item_doc(space, space.kitems.get(item_id))

    @app.patch("/kitems/{item_id}")
    def patch_kitem(item_id: str, body: dict):
        item = space.kitems.get(item_id)
        if "name" in body:
            item.name = body["name"]
        if "summary" in body:
            item.summary = body["summary"]
        space.kitems._changed(item)
        persist()
        return _item_doc(space, item)

    @app.post("/kitems/{item_id}/links", status_code=201)
    def add_link(item_id: str, body: dict):
        from ..rdf import Iri

        link = space.kitems.link_kitems(
            item_id,
            body["target"],
            Iri(body["relation"]) if body.get("relation") else None,
            body.get("label"),
        )
        persist()
        return {"target": link.target, "relation": link.relation.value, "label": link.label}

    @app.post("/kitems/{item_id}/annotations", status_code=201)
    def add_annotation(item_id: str, body: dict):
        item = space.kitems.annotate(item_id, body["iri"])
        persist()
        return {"annotations": [a.value for a in item.annotations]}

    @app.post("/kitems/{item_id}/attachments", status_code=201)
    async def add_attachment(item_id: str, request: Request):
        filename = request.query_params.get("filename")
        if not filename:
            return JSONResponse(
                status_code=400,
                content={"code": "usage-error", "message": "filename query param required"},
            )
        media_type = request.headers.get("content-type", "application/octet-stream")
        data = await request.body()
        attachment = space.kitems.attach(item_id, filename, data, media_type)
        space.apps.drain()
        persist()
        return {"filename": attachment.filename, "checksum": attachment.checksum}

    @app.get("/kitems/{item_id}/attachments/{filename}")
    def get_attachment(item_id: str, filename: str):
        attachment = space.kitems.get_attachment(item_id, filename)
        return Response(content=attachment.data, media_type=attachment.media_type)

    @app.post("/kitems/{item_id}/ingest")
    def ingest(item_id: str, body: dict):
        report = space.ingest(
            item_id,
            body["filename"],
            body["mapping"].encode("utf-8"),
            body.get("config", {}),
            mapping_format=body.get("mapping_format", "structured"),
        )
        persist()
        return {
            "item_id": report.item_id,
            "level": report.level,
            "metadata_count": report.metadata_count,
            "triples_written": report.triples_written,
            "unmapped_keys": report.unmapped_keys,
            "columns": report.columns,
        }

    @app.post("/kitems/{item_id}/forms/{ktype_id}/submit")
    def form_submit(item_id: str, ktype_id: str, body: dict):
        schema = space.forms.get(ktype_id)
        count = submit_form(space.kitems, item_id, schema, body, space.units)
        persist()
        return {"triples_written": count, "form_version": schema.version}

    @app.get("/kitems/{item_id}/graph")
    def get_graph(item_id: str):
        item = space.kitems.get(item_id)
        return Response(
            content=space.store.serialize_graph(item.graph_iri),
            media_type="text/turtle",
        )

    @app.get("/kitems/{item_id}/linkgraph")
    def link_graph(item_id: str, depth: int = 2):
        return space.kitems.export_link_graph(item_id, depth)

    @app.get("/kitems/{item_id}/level")
    def level(item_id: str):
        return {"level": space.kitems.integration_level(item_id)}

    @app.get("/kitems/{item_id}/columns/{name}")
    def column(item_id: str, name: str):
        item = space.kitems.get(item_id)
        if item.container is None:
            raise KItemError(f"k-item {item_id} has no container")
        col = item.container.column(name)
        return {
            "name": col.name,
            "values": [float(v) for v in col.values],
            "concept": col.concept.value if col.concept else None,
            "unit": col.unit.value if col.unit else None,
        }

    # search ----------------------------------------------------------------
    @app.get("/search")
    def search(
        q: str | None = None,
        ktype: str | None = None,
        annotation: str | None = None,
        limit: int | None = None,
    ):
        ktypes = ktype.split(",") if ktype else None
        annotations = annotation.split(",") if annotation else None
        hits = space.search.search(q, ktypes, annotations, limit)
        return [
            {
                "id": h.kitem_id,
                "score": h.score,
                "name": space.kitems.get(h.kitem_id).name,
                "ktype": space.kitems.get(h.kitem_id).ktype,
                "annotations": [
                    a.value for a in space.kitems.get(h.kitem_id).annotations
                ],
            }
            for h in hits
        ]

    # sparql ------------------------------------------------------------------
    @app.post("/sparql")
    async def sparql(request: Request):
        content_type = request.headers.get("content-type", "")
        body = (await request.body()).decode("utf-8")
        if content_type.startswith("application/sparql-query"):
            query = body
        elif content_type.startswith("application/json"):
            query = json.loads(body).get("query", "")
        else:
            query = body
        return JSONResponse(
            content=space.sparql(query),
            media_type="application/sparql-results+json",
        )

    # vocabulary ------------------------------------------------------------
    @app.get("/vocabulary/terms")
    def vocab_terms():
        return [
            {
                "iri": t.iri.value,
                "label": t.label,
                "namespace": t.namespace,
                "parent": t.parent.value if t.parent else None,
                "description": t.description,
            }
            for t in space.vocabulary.all_terms()
        ]

    @app.post("/vocabulary/terms", status_code=201)
    def vocab_register(body: dict):
        term = space.vocabulary.register_term(
            body["namespace"],
            body["label"],
            body.get("parent"),
            body.get("description"),
        )
        persist()
        return {"iri": term.iri.value, "label": term.label}

    @app.get("/vocabulary/search")
    def vocab_search(q: str):
        return [
            {"iri": t.iri.value, "label": t.label, "description": t.description}
            for t in space.vocabulary.find_terms(q)
        ]

    # forms --------------------------------------------------------------------
    @app.post("/ktypes/{ktype_id}/form", status_code=201)
    def attach_form(ktype_id: str, body: dict):
        schema = space.forms.attach_form(
            space.kitems, ktype_id, FormSchema.from_dict({**body, "ktype": ktype_id})
        )
        persist()
        return schema.to_dict()

    @app.get("/ktypes/{ktype_id}/form")
    def get_form(ktype_id: str):
        return space.forms.get(ktype_id).to_dict()

    # apps -----------------------------------------------------------------------
    @app.get("/apps")
    def list_apps():
        return [a.to_dict() for a in space.apps.apps.values()]

    @app.post("/apps", status_code=201)
    def register_app(body: dict):
        spec = space.apps.register_app(AppSpec.from_dict(body))
        persist()
        return spec.to_dict()

    @app.post("/apps/{app_id}/run", status_code=202)
    def run_app(app_id: str, body: dict):
        record = space.apps.run(app_id, body["inputs"], body.get("settings", {}))
        persist()
        return {"run_id": record.run_id, "status": record.status}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return space.apps.get_run(run_id).to_dict()

    # cards -------------------------------------------------------------------------
    @app.post("/kitems/{card_id}/export")
    def export(card_id: str, body: dict):
        filename = export_card(
            space.kitems, space.provenance, card_id, body.get("template", "hs-analytic")
        )
        persist()
        return {"filename": filename}

    # connectors -----------------------------------------------------------------
    @app.get("/connectors")
    def list_connectors():
        return [c.to_dict() for c in space.connectors.connectors.values()]

    @app.post("/connectors", status_code=201)
    def add_connector(body: dict):
        spec = space.connectors.add(ConnectorSpec.from_dict(body))
        persist()
        return spec.to_dict()

    @app.post("/connectors/{connector_id}/sync")
    def sync_connector(connector_id: str, body: dict | None = None):
        spec = space.connectors.get(connector_id)
        if body and body.get("catalog"):
            catalog = body["catalog"].encode("utf-8")
        else:
            catalog = _fetch_catalog(spec.endpoint)
        report = space.connectors.sync(connector_id, catalog)
        persist()
        return report.to_dict()

    return app


def _fetch_catalog(endpoint: str) -> bytes:
    if endpoint.startswith(("http://", "https://")):
        from urllib.request import urlopen

        with urlopen(endpoint) as response:  # noqa: S310 - operator-supplied URL
            return response.read()
    return Path(endpoint).read_bytes()

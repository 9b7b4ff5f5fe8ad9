"""Command-line interface mirroring the REST gateway. State is loaded from
and saved back to a data directory on every invocation."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..apps import AppSpec
from ..cards import export_card
from ..connectors import ConnectorSpec
from ..forms import FormSchema, submit as submit_form
from ..rdf import Iri
from ..space import Dataspace


class Session:
    def __init__(self, data_dir: Path, as_json: bool):
        self.data_dir = data_dir
        self.as_json = as_json
        self._space: Dataspace | None = None

    @property
    def space(self) -> Dataspace:
        if self._space is None:
            if (self.data_dir / "state.json").exists():
                self._space = Dataspace.load(self.data_dir)
            else:
                self._space = Dataspace().seed()
        return self._space

    def save(self):
        self.space.save(self.data_dir)

    def emit(self, doc, human: str | None = None):
        if self.as_json:
            click.echo(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
        else:
            click.echo(human if human is not None else json.dumps(doc, ensure_ascii=False))


pass_session = click.make_pass_decorator(Session)


@click.group()
@click.option(
    "--data",
    "data_dir",
    envvar="DATASPACE_DATA",
    default="dataspace-data",
    type=click.Path(path_type=Path),
    help="State directory.",
)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, data_dir: Path, as_json: bool):
    """Dataspace kernel command line."""
    ctx.obj = Session(data_dir, as_json)


def run(session: Session, fn):
    """Execute a command body, mapping domain errors to exit code 1."""
    try:
        return fn()
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


# serve ---------------------------------------------------------------------


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--token", default=None, help="Shared secret guarding mutations.")
@pass_session
def serve(session: Session, host: str, port: int, token: str | None):
    """Run the REST gateway."""
    import uvicorn

    from .api import create_app

    app = create_app(session.space, data_dir=session.data_dir, token=token)
    uvicorn.run(app, host=host, port=port)


# ktypes -----------------------------------------------------------------------


@main.group()
def ktype():
    """Manage k-types."""


@ktype.command("add")
@click.argument("ktype_id")
@click.option("--name", default=None)
@click.option("--description", default="")
@pass_session
def ktype_add(session: Session, ktype_id: str, name: str | None, description: str):
    def body():
        kt = session.space.kitems.add_ktype(ktype_id, name or ktype_id, description)
        session.save()
        session.emit({"id": kt.id, "name": kt.name}, f"{kt.id}\t{kt.name}")

    run(session, body)


@ktype.command("list")
@pass_session
def ktype_list(session: Session):
    ktypes = session.space.kitems.ktypes.values()
    session.emit(
        [{"id": k.id, "name": k.name, "description": k.description} for k in ktypes],
        "\n".join(f"{k.id}\t{k.name}" for k in ktypes),
    )


# k-items -------------------------------------------------------------------------


@main.group()
def kitem():
    """Manage k-items."""


@kitem.command("create")
@click.option("--ktype", "ktype_id", required=True)
@click.option("--name", required=True)
@click.option("--summary", default="")
@click.option("--id", "item_id", default=None, help="Explicit id (otherwise random).")
@pass_session
def kitem_create(session, ktype_id, name, summary, item_id):
    def body():
        item = session.space.kitems.create_kitem(ktype_id, name, summary, item_id)
        session.save()
        session.emit({"id": item.id, "ktype": item.ktype, "name": item.name}, item.id)

    run(session, body)


@kitem.command("get")
@click.argument("item_id")
@pass_session
def kitem_get(session, item_id):
    def body():
        from .api import _item_doc

        doc = _item_doc(session.space, session.space.kitems.get(item_id))
        lines = [f"{doc['id']} ({doc['ktype']}): {doc['name']}"]
        if doc["summary"]:
            lines.append(f"  summary: {doc['summary']}")
        for a in doc["annotations"]:
            lines.append(f"  annotation: {a}")
        for l in doc["links"]:
            lines.append(f"  link: {l['relation']} -> {l['target']}")
        for f in doc["attachments"]:
            lines.append(f"  file: {f['filename']} ({f['media_type']}, {f['size']} bytes)")
        if doc["columns"]:
            lines.append(f"  columns: {', '.join(doc['columns'])}")
        session.emit(doc, "\n".join(lines))

    run(session, body)


@kitem.command("link")
@click.argument("source_id")
@click.argument("target_id")
@click.option("--relation", default=None)
@click.option("--label", default=None)
@pass_session
def kitem_link(session, source_id, target_id, relation, label):
    def body():
        link = session.space.kitems.link_kitems(
            source_id, target_id, Iri(relation) if relation else None, label
        )
        session.save()
        session.emit(
            {"target": link.target, "relation": link.relation.value},
            f"{source_id} -> {target_id} ({link.relation.value})",
        )

    run(session, body)


@kitem.command("annotate")
@click.argument("item_id")
@click.argument("iri")
@pass_session
def kitem_annotate(session, item_id, iri):
    def body():
        item = session.space.kitems.annotate(item_id, iri)
        session.save()
        annotations = [a.value for a in item.annotations]
        session.emit({"annotations": annotations}, "\n".join(annotations))

    run(session, body)


@kitem.command("attach")
@click.argument("item_id")
@click.argument("path", type=click.Path(exists=True, path_type=Path))
@click.option("--media-type", default=None)
@click.option("--filename", default=None, help="Override the stored filename.")
@pass_session
def kitem_attach(session, item_id, path: Path, media_type, filename):
    def body():
        media = media_type or _guess_media_type(path)
        attachment = session.space.kitems.attach(
            item_id, filename or path.name, path.read_bytes(), media
        )
        records = session.space.apps.drain()
        session.save()
        doc = {
            "filename": attachment.filename,
            "checksum": attachment.checksum,
            "triggered_runs": [r.run_id for r in records],
        }
        session.emit(doc, attachment.filename)

    run(session, body)


def _guess_media_type(path: Path) -> str:
    import mimetypes

    return mimetypes.guess_type(path.name)[0] or "application/octet-stream"


# ingest ----------------------------------------------------------------------------


@main.command()
@click.argument("item_id")
@click.argument("filename")
@click.option("--mapping", "mapping_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--mapping-format", default="structured", type=click.Choice(["structured", "two-column"]))
@pass_session
def ingest(session, item_id, filename, mapping_path: Path, config_path: Path, mapping_format):
    """Semantify an attached raw file using a mapping and a parser config."""

    def body():
        report = session.space.ingest(
            item_id,
            filename,
            mapping_path.read_bytes(),
            json.loads(config_path.read_text(encoding="utf-8")),
            mapping_format=mapping_format,
        )
        session.save()
        doc = {
            "item_id": report.item_id,
            "level": report.level,
            "metadata_count": report.metadata_count,
            "triples_written": report.triples_written,
            "unmapped_keys": report.unmapped_keys,
            "columns": report.columns,
        }
        session.emit(
            doc,
            f"level {report.level}, {report.metadata_count} metadata, "
            f"{report.triples_written} triples, columns: {', '.join(report.columns) or '-'}",
        )

    run(session, body)


# search/query ----------------------------------------------------------------------


@main.command()
@click.option("--text", default=None)
@click.option("--ktype", "ktypes", multiple=True)
@click.option("--annotation", "annotations", multiple=True)
@click.option("--limit", default=None, type=int)
@pass_session
def search(session, text, ktypes, annotations, limit):
    """Faceted and free-text search."""

    def body():
        hits = session.space.search.search(
            text, list(ktypes) or None, list(annotations) or None, limit
        )
        items = session.space.kitems
        doc = [
            {
                "id": h.kitem_id,
                "score": h.score,
                "name": items.get(h.kitem_id).name,
                "ktype": items.get(h.kitem_id).ktype,
            }
            for h in hits
        ]
        session.emit(
            doc,
            "\n".join(f"{d['id']}\t{d['name']}\t{d['score']:.4f}" for d in doc) or "(no hits)",
        )

    run(session, body)


@main.command()
@click.argument("query_text", required=False)
@pass_session
def query(session, query_text):
    """Run a SPARQL SELECT query (argument or stdin)."""

    def body():
        text = query_text or sys.stdin.read()
        result = session.space.sparql(text)
        rows = []
        variables = result["head"]["vars"]
        for binding in result["results"]["bindings"]:
            rows.append("\t".join(binding.get(v, {}).get("value", "") for v in variables))
        session.emit(result, "\t".join(variables) + ("\n" + "\n".join(rows) if rows else ""))

    run(session, body)


# vocabulary ---------------------------------------------------------------------------


@main.group()
def vocab():
    """Manage the controlled vocabulary."""


@vocab.command("register")
@click.option("--namespace", required=True)
@click.option("--label", required=True)
@click.option("--parent", default=None)
@click.option("--description", default=None)
@pass_session
def vocab_register(session, namespace, label, parent, description):
    def body():
        term = session.space.vocabulary.register_term(namespace, label, parent, description)
        session.save()
        session.emit({"iri": term.iri.value, "label": term.label}, term.iri.value)

    run(session, body)


@vocab.command("search")
@click.argument("query_text")
@pass_session
def vocab_search(session, query_text):
    hits = session.space.vocabulary.find_terms(query_text)
    session.emit(
        [{"iri": t.iri.value, "label": t.label} for t in hits],
        "\n".join(f"{t.iri.value}\t{t.label}" for t in hits) or "(no terms)",
    )


@vocab.command("list")
@pass_session
def vocab_list(session):
    terms = session.space.vocabulary.all_terms()
    session.emit(
        [{"iri": t.iri.value, "label": t.label} for t in terms],
        "\n".join(f"{t.iri.value}\t{t.label}" for t in terms) or "(no terms)",
    )


# forms ------------------------------------------------------------------------------


@main.group()
def form():
    """Manage form schemas and submissions."""


@form.command("attach")
@click.argument("ktype_id")
@click.argument("schema_path", type=click.Path(exists=True, path_type=Path))
@pass_session
def form_attach(session, ktype_id, schema_path: Path):
    def body():
        doc = json.loads(schema_path.read_text(encoding="utf-8"))
        schema = session.space.forms.attach_form(
            session.space.kitems, ktype_id, FormSchema.from_dict({**doc, "ktype": ktype_id})
        )
        session.save()
        session.emit(schema.to_dict(), f"version {schema.version}")

    run(session, body)


@form.command("show")
@click.argument("ktype_id")
@pass_session
def form_show(session, ktype_id):
    def body():
        schema = session.space.forms.get(ktype_id)
        session.emit(
            schema.to_dict(),
            "\n".join(f"{f.key} ({f.kind})" for f in schema.fields),
        )

    run(session, body)


@form.command("submit")
@click.argument("item_id")
@click.argument("values_path", type=click.Path(exists=True, path_type=Path))
@pass_session
def form_submit_cmd(session, item_id, values_path: Path):
    def body():
        item = session.space.kitems.get(item_id)
        schema = session.space.forms.get(item.ktype)
        values = json.loads(values_path.read_text(encoding="utf-8"))
        count = submit_form(session.space.kitems, item_id, schema, values, session.space.units)
        session.save()
        session.emit({"triples_written": count}, f"{count} triples written")

    run(session, body)


# apps ----------------------------------------------------------------------------------


@main.group()
def app():
    """Manage apps and runs."""


@app.command("register")
@click.argument("spec_path", type=click.Path(exists=True, path_type=Path))
@pass_session
def app_register(session, spec_path: Path):
    def body():
        spec = session.space.apps.register_app(
            AppSpec.from_dict(json.loads(spec_path.read_text(encoding="utf-8")))
        )
        session.save()
        session.emit(spec.to_dict(), spec.id)

    run(session, body)


@app.command("run")
@click.argument("app_id")
@click.option("--input", "inputs", multiple=True, required=True)
@click.option("--settings", "settings_json", default="{}")
@pass_session
def app_run(session, app_id, inputs, settings_json):
    def body():
        record = session.space.apps.run(app_id, list(inputs), json.loads(settings_json))
        session.save()
        session.emit(
            record.to_dict(),
            f"{record.run_id}: {record.status}, outputs: {', '.join(record.outputs) or '-'}",
        )
        if record.status == "failed":
            sys.exit(1)

    run(session, body)


@app.command("show-run")
@click.argument("run_id")
@pass_session
def app_show_run(session, run_id):
    def body():
        record = session.space.apps.get_run(run_id)
        session.emit(record.to_dict(), f"{record.run_id}: {record.status}")

    run(session, body)


# cards -----------------------------------------------------------------------------------


@main.group()
def card():
    """Material-card operations."""


@card.command("export")
@click.argument("card_id")
@click.option("--template", default="hs-analytic")
@click.option("--out", "out_path", default=None, type=click.Path(path_type=Path))
@pass_session
def card_export(session, card_id, template, out_path: Path | None):
    def body():
        filename = export_card(
            session.space.kitems, session.space.provenance, card_id, template
        )
        attachment = session.space.kitems.get_attachment(card_id, filename)
        if out_path is not None:
            out_path.write_bytes(attachment.data)
        session.save()
        session.emit({"filename": filename}, filename)

    run(session, body)


# connectors ----------------------------------------------------------------------------


@main.group()
def connector():
    """Manage external-catalog connectors."""


@connector.command("add")
@click.argument("connector_id")
@click.option("--endpoint", required=True)
@click.option("--ktype", default="dataset")
@click.option("--poll-interval", default=0, type=int)
@pass_session
def connector_add(session, connector_id, endpoint, ktype, poll_interval):
    def body():
        spec = session.space.connectors.add(
            ConnectorSpec(connector_id, endpoint, ktype, poll_interval)
        )
        session.save()
        session.emit(spec.to_dict(), spec.id)

    run(session, body)


@connector.command("sync")
@click.argument("connector_id")
@click.option("--catalog", "catalog_path", default=None, type=click.Path(exists=True, path_type=Path))
@pass_session
def connector_sync(session, connector_id, catalog_path: Path | None):
    def body():
        from .api import _fetch_catalog

        spec = session.space.connectors.get(connector_id)
        catalog = (
            catalog_path.read_bytes() if catalog_path else _fetch_catalog(spec.endpoint)
        )
        report = session.space.connectors.sync(connector_id, catalog)
        session.save()
        session.emit(
            report.to_dict(),
            f"created {report.created}, updated {report.updated}, "
            f"unchanged {report.unchanged}",
        )

    run(session, body)


# level -------------------------------------------------------------------------------------


@main.command()
@click.argument("item_id")
@pass_session
def level(session, item_id):
    """Print a k-item's integration level."""

    def body():
        value = session.space.kitems.integration_level(item_id)
        session.emit({"level": value}, str(value))

    run(session, body)


if __name__ == "__main__":
    main()

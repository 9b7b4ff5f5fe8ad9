"""Registered apps with upload triggers, a drainable run queue, and
PROV-recorded run execution."""

from __future__ import annotations

import fnmatch
import json
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import ns
from .forms import FormSchema, validate as validate_form
from .kitems import KItem, KItemStore
from .provenance import ProvenanceLog
from .rdf import Iri


class AppError(ValueError):
    pass


@dataclass
class AppSpec:
    id: str
    name: str
    operation: str
    glob: str | None = None
    required_annotations: list[str] = field(default_factory=list)
    settings_schema: FormSchema | None = None

    @property
    def auto(self) -> bool:
        return bool(self.glob or self.required_annotations)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "operation": self.operation,
            "glob": self.glob,
            "required_annotations": list(self.required_annotations),
            "settings_schema": self.settings_schema.to_dict() if self.settings_schema else None,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AppSpec":
        schema = doc.get("settings_schema")
        return cls(
            id=doc["id"],
            name=doc.get("name", doc["id"]),
            operation=doc["operation"],
            glob=doc.get("glob"),
            required_annotations=list(doc.get("required_annotations", [])),
            settings_schema=FormSchema.from_dict(schema) if schema else None,
        )


@dataclass
class RunRecord:
    run_id: str
    app_id: str
    inputs: list[str]
    outputs: list[str]
    settings: dict
    status: str  # "succeeded" | "failed"
    started: str
    ended: str
    log: str

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "app_id": self.app_id,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "settings": dict(self.settings),
            "status": self.status,
            "started": self.started,
            "ended": self.ended,
            "log": self.log,
        }


@dataclass
class RunContext:
    """Handed to operations: everything a run may touch, plus its identity
    so output item ids stay deterministic."""

    kitems: KItemStore
    provenance: ProvenanceLog
    run_id: str
    settings: dict
    log_lines: list[str] = field(default_factory=list)
    # extra provenance entities contributed by the operation (e.g. files)
    used_entities: list[Iri] = field(default_factory=list)
    generated_entities: list[Iri] = field(default_factory=list)

    def log(self, message: str):
        self.log_lines.append(message)


class AppRegistry:
    """Apps, named operations, and the pending-run queue."""

    def __init__(self, kitems: KItemStore, provenance: ProvenanceLog, clock=None):
        self.kitems = kitems
        self.provenance = provenance
        self._clock = clock or (lambda: "")
        self.apps: dict[str, AppSpec] = {}
        self.operations: dict[str, object] = {}
        self.runs: dict[str, RunRecord] = {}
        self._run_counter = 0
        self._queue: list[tuple[str, str, str]] = []  # (app id, item id, filename)
        self._dispatched: set[tuple[str, str, str]] = set()
        kitems.on_upload.append(self._on_upload)

    # registration ---------------------------------------------------
    def register_operation(self, name: str, fn):
        self.operations[name] = fn

    def register_app(self, spec: AppSpec) -> AppSpec:
        if spec.id in self.apps:
            raise AppError(f"app id {spec.id!r} already registered")
        if spec.operation not in self.operations and not spec.operation.startswith("external:"):
            raise AppError(f"unknown operation {spec.operation!r}")
        self.apps[spec.id] = spec
        return spec

    def get(self, app_id: str) -> AppSpec:
        try:
            return self.apps[app_id]
        except KeyError:
            raise AppError(f"unknown app {app_id!r}") from None

    # triggers ---------------------------------------------------------
    def match_triggers(self, item: KItem, filename: str) -> list[AppSpec]:
        matched = []
        annotations = {a.value for a in item.annotations}
        for app in sorted(self.apps.values(), key=lambda a: a.id):
            if not app.auto:
                continue
            if app.glob and not fnmatch.fnmatch(filename, app.glob):
                continue
            if not set(app.required_annotations).issubset(annotations):
                continue
            matched.append(app)
        return matched

    def _on_upload(self, item: KItem, filename: str):
        for app in self.match_triggers(item, filename):
            event = (app.id, item.id, filename)
            if event not in self._dispatched:
                self._dispatched.add(event)
                self._queue.append(event)

    def pending(self) -> list[tuple[str, str, str]]:
        return list(self._queue)

    def drain(self) -> list[RunRecord]:
        """Execute every queued triggered run synchronously."""
        records = []
        while self._queue:
            app_id, item_id, _ = self._queue.pop(0)
            records.append(self.run(app_id, [item_id], {}))
        return records

    # execution ----------------------------------------------------------
    def _next_run_id(self) -> str:
        self._run_counter += 1
        return f"run-{self._run_counter:04d}"

    def run(self, app_id: str, input_ids: list[str], settings: dict | None = None) -> RunRecord:
        app = self.get(app_id)
        settings = dict(settings or {})
        inputs = [self.kitems.get(i) for i in input_ids]
        if not inputs:
            raise AppError("a run needs at least one input k-item")
        if app.settings_schema is not None:
            violations = validate_form(app.settings_schema, settings)
            if violations:
                raise AppError("invalid settings: " + "; ".join(violations))

        run_id = self._next_run_id()
        started = self._clock()
        ctx = RunContext(self.kitems, self.provenance, run_id, settings)

        operation = self.operations.get(app.operation)
        try:
            if operation is not None:
                outputs = operation(ctx, inputs) or []
            else:
                outputs = _run_external(app.operation[len("external:"):], ctx, inputs)
            status = "succeeded"
        except Exception as exc:  # noqa: BLE001 - failures become run records
            ctx.log(f"error: {exc}")
            outputs = []
            status = "failed"

        activity = ns.run_iri(run_id)
        used = [item.iri for item in inputs]
        settings_entity = Iri(f"{activity.value}/settings")
        used.append(settings_entity)
        generated: list[Iri] = []
        if status == "succeeded":
            used += [e for e in ctx.used_entities if e not in used]
            generated = [o.iri for o in outputs] + list(ctx.generated_entities)
        self.provenance.record_activity(
            activity,
            used,
            generated,
            agent=ns.app_iri(app.id),
            label=app.name,
            failed=status == "failed",
        )
        if status == "succeeded":
            for item in inputs:
                for out in outputs:
                    if not any(
                        l.target == out.id and l.relation == ns.DSMS_IS_INPUT_FOR
                        for l in item.links
                    ):
                        self.kitems.link_kitems(item.id, out.id, ns.DSMS_IS_INPUT_FOR)

        record = RunRecord(
            run_id=run_id,
            app_id=app.id,
            inputs=[i.id for i in inputs],
            outputs=[o.id for o in outputs],
            settings=settings,
            status=status,
            started=started,
            ended=self._clock(),
            log="\n".join(ctx.log_lines),
        )
        self.runs[run_id] = record
        return record

    def get_run(self, run_id: str) -> RunRecord:
        try:
            return self.runs[run_id]
        except KeyError:
            raise AppError(f"unknown run {run_id!r}") from None


def _run_external(command: str, ctx: RunContext, inputs: list[KItem]) -> list[KItem]:
    """Invoke an external command with staged input files and a settings
    JSON; files it writes to the output directory become attachments on a
    fresh result k-item."""
    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        in_dir = tmp_path / "inputs"
        out_dir = tmp_path / "outputs"
        in_dir.mkdir()
        out_dir.mkdir()
        paths = []
        for item in inputs:
            for name, attachment in sorted(item.attachments.items()):
                if attachment.derived:
                    continue
                path = in_dir / f"{item.id}__{name}"
                path.write_bytes(attachment.data)
                paths.append(str(path))
        settings_path = tmp_path / "settings.json"
        settings_path.write_text(json.dumps(ctx.settings, sort_keys=True))
        proc = subprocess.run(
            command.split() + paths + [str(settings_path), str(out_dir)],
            capture_output=True,
            text=True,
        )
        ctx.log(proc.stdout)
        if proc.returncode != 0:
            raise AppError(f"external command failed ({proc.returncode}): {proc.stderr}")
        produced = sorted(p for p in out_dir.iterdir() if p.is_file())
        if not produced:
            return []
        ktype = inputs[0].ktype
        result = ctx.kitems.create_kitem(
            ktype, f"{ctx.run_id} result", item_id=f"{ctx.run_id}-result"
        )
        for path in produced:
            ctx.kitems.attach(result.id, path.name, path.read_bytes(), derived=True)
        return [result]

import itertools
import json

import pytest

from dataspace import Dataspace, ns
from dataspace.apps import AppSpec

from . import helpers


ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, status in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number:02d} {status}: {description}")


def make_clock(prefix: str = "2026-01-01T00:00"):
    """Deterministic, strictly increasing ISO-ish timestamps."""
    counter = itertools.count()

    def clock():
        n = next(counter)
        return f"{prefix}:{n // 1000000:02d}.{n % 1000000:06d}+00:00"

    return clock


@pytest.fixture
def space():
    return Dataspace(clock=make_clock()).seed()


def register_tensile_context(space: Dataspace):
    if not space.vocabulary.has(ns.STEEL + "TensileTest"):
        space.vocabulary.register_term(ns.STEEL, "TensileTest")


def register_hardness_context(space: Dataspace):
    if not space.vocabulary.has(ns.STEEL + "HardnessTest"):
        space.vocabulary.register_term(ns.STEEL, "HardnessTest")


def ingest_fig7(space: Dataspace, item_id: str = "ds1", name: str = "AFZ1-Fz-S1D"):
    register_tensile_context(space)
    if item_id not in space.kitems.items:
        space.kitems.create_kitem("dataset", name, item_id=item_id)
    space.kitems.attach(item_id, "fig7.csv", helpers.fig7_bytes(), media_type="text/csv")
    report = space.ingest(item_id, "fig7.csv", helpers.fig7_mapping(), helpers.fig7_config())
    return report


def ingest_fig14(space: Dataspace, item_id: str = "hd1", name: str = "hardness A",
                 data: bytes | None = None):
    register_hardness_context(space)
    if item_id not in space.kitems.items:
        space.kitems.create_kitem("dataset", name, item_id=item_id)
    space.kitems.attach(
        item_id, "hardness.csv", data or helpers.fig14_bytes(), media_type="text/csv"
    )
    return space.ingest(
        item_id, "hardness.csv", helpers.fig14_mapping(), helpers.fig14_config()
    )


def tensile_eval_app() -> AppSpec:
    return AppSpec(
        id="tensile-eval",
        name="Tensile evaluation",
        operation="tensile-eval",
        glob="*.csv",
        required_annotations=[ns.STEEL + "TensileTest"],
    )


def card_export_app() -> AppSpec:
    return AppSpec(id="card-export", name="Card export", operation="card-export")


def ingest_kupfer_corpus(space: Dataspace, datasets=None):
    """Attach and semantify the whole copper-alloy hardness corpus."""
    datasets = datasets or helpers.kupfer_corpus()
    for d in datasets:
        ingest_fig14(space, item_id=d["id"], name=f"{d['alloy']} hardness {d['id']}",
                     data=d["csv"])
    return datasets


def write_fixture_files(tmp_path):
    """Copies of the standard fixtures on disk, for CLI invocations."""
    paths = {}
    for name in ("fig7.csv", "fig7-mapping.json", "fig7-config.json",
                 "fig14.csv", "fig14-mapping.json", "fig14-config.json"):
        target = tmp_path / name
        target.write_bytes((helpers.FIXTURES / name).read_bytes())
        paths[name] = target
    return paths


def dump_json(tmp_path, name: str, doc) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)

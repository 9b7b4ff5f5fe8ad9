"""Columnar container: named float64 arrays in a bit-exact binary layout.

Layout: magic ``KDC1`` | u32 little-endian manifest length | UTF-8 JSON
manifest | concatenated little-endian float64 payloads. Column offsets in
the manifest are relative to the start of the payload region.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .rdf import Iri

MAGIC = b"KDC1"


class ContainerError(ValueError):
    pass


@dataclass
class Column:
    name: str
    values: np.ndarray
    concept: Iri | None = None
    unit: Iri | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype="<f8")
        if self.values.ndim != 1 or self.values.size == 0:
            raise ContainerError(f"column {self.name!r} must be a non-empty 1-d array")


@dataclass
class ColumnContainer:
    columns: list[Column] = field(default_factory=list)

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(names) != len(set(names)):
            raise ContainerError("duplicate column names")

    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise ContainerError(f"no column named {name!r}")

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def manifest(self) -> dict:
        entries = []
        offset = 0
        for c in self.columns:
            entries.append(
                {
                    "name": c.name,
                    "concept": c.concept.value if c.concept else None,
                    "unit": c.unit.value if c.unit else None,
                    "length": int(c.values.size),
                    "dtype": "f64",
                    "offset": offset,
                }
            )
            offset += c.values.size * 8
        return {"columns": entries}


def write_container(container: ColumnContainer) -> bytes:
    manifest = json.dumps(container.manifest(), sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<I", len(manifest)), manifest]
    for c in container.columns:
        parts.append(c.values.astype("<f8").tobytes())
    return b"".join(parts)


def read_container(data: bytes) -> ColumnContainer:
    if data[:4] != MAGIC:
        raise ContainerError("bad magic bytes")
    (manifest_len,) = struct.unpack_from("<I", data, 4)
    manifest_end = 8 + manifest_len
    try:
        manifest = json.loads(data[8:manifest_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"bad manifest: {exc}") from None
    payload = data[manifest_end:]
    columns = []
    for entry in manifest["columns"]:
        if entry.get("dtype") != "f64":
            raise ContainerError(f"unsupported dtype {entry.get('dtype')!r}")
        start = entry["offset"]
        end = start + entry["length"] * 8
        if end > len(payload):
            raise ContainerError(f"column {entry['name']!r} payload out of bounds")
        values = np.frombuffer(payload[start:end], dtype="<f8").copy()
        columns.append(
            Column(
                entry["name"],
                values,
                Iri(entry["concept"]) if entry.get("concept") else None,
                Iri(entry["unit"]) if entry.get("unit") else None,
            )
        )
    return ColumnContainer(columns)

"""JSON interchange format (``format_version`` "1") for placed netlists."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from ..model import Cell, Net, NetlistError, NetlistGraph, build_graph
from .location import parse_location

FORMAT_VERSION = "1"


class SchemaError(NetlistError):
    """Interchange document does not match the schema; ``pointer`` locates the problem."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


_PIN = {
    "type": "object",
    "required": ["cell", "pin"],
    "properties": {"cell": {"type": "string"}, "pin": {"type": "string"}},
}

SCHEMA = {
    "type": "object",
    "required": ["device", "format_version", "cells", "nets"],
    "properties": {
        "device": {"type": "string"},
        "format_version": {"type": "string"},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "type", "init", "site", "tile", "clock_region", "hier_name"],
                "properties": {
                    "name": {"type": "string"},
                    "type": {"type": "string"},
                    "init": {"type": "string"},
                    "site": {"type": "string"},
                    "tile": {"type": "string"},
                    "clock_region": {"type": "string"},
                    "hier_name": {"type": ["string", "null"]},
                },
            },
        },
        "nets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "source", "sinks"],
                "properties": {
                    "name": {"type": "string"},
                    "source": _PIN,
                    "sinks": {"type": "array", "items": _PIN},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class NetlistDocument:
    cells: tuple[Cell, ...] = ()
    nets: tuple[Net, ...] = ()
    device: str = ""
    format_version: str = FORMAT_VERSION
    # diagnostics collected at ingestion; not serialized
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for i, c in enumerate(self.cells):
            if c.id != i:
                raise NetlistError(f"cell ids must be dense and ordered; {c.name!r} has id {c.id}, expected {i}")

    def graph(self) -> NetlistGraph:
        return build_graph(self.cells, self.nets)

    def cell_by_name(self) -> dict[str, Cell]:
        return {c.name: c for c in self.cells}


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def to_dict(doc: NetlistDocument) -> dict:
    names = [c.name for c in doc.cells]
    return {
        "device": doc.device,
        "format_version": doc.format_version,
        "cells": [
            {
                "name": c.name,
                "type": c.cell_type,
                "init": c.boolean_equation,
                "site": c.placement.site_name,
                "tile": c.placement.tile_name,
                "clock_region": c.placement.clock_region_name,
                "hier_name": c.hier_name,
            }
            for c in doc.cells
        ],
        "nets": [
            {
                "name": n.name,
                "source": {"cell": names[n.source[0]], "pin": n.source[1]},
                "sinks": [{"cell": names[cid], "pin": pin} for cid, pin in n.sinks],
            }
            for n in doc.nets
        ],
    }


def from_dict(data) -> NetlistDocument:
    if isinstance(data, dict) and "format_version" in data and data["format_version"] != FORMAT_VERSION:
        raise SchemaError(
            "/format_version",
            f"unsupported format_version {data['format_version']!r}; this reader handles "
            f"{FORMAT_VERSION!r}; upgrade fpga_regroup to read newer interchange files",
        )
    err = jsonschema.exceptions.best_match(jsonschema.Draft7Validator(SCHEMA).iter_errors(data))
    if err is not None:
        pointer = _pointer(err.absolute_path)
        if err.validator == "required":
            missing = [k for k in err.validator_value if k not in err.instance]
            if missing:
                pointer += f"/{missing[0]}"
        raise SchemaError(pointer, err.message)

    cells = []
    index = {}
    for i, raw in enumerate(data["cells"]):
        if raw["name"] in index:
            raise SchemaError(f"/cells/{i}/name", f"duplicate cell name {raw['name']!r}")
        try:
            placement = parse_location(raw["site"], raw["tile"], raw["clock_region"])
            cells.append(Cell(i, raw["name"], raw["type"], raw["init"], placement, raw["hier_name"]))
        except NetlistError as exc:
            raise SchemaError(f"/cells/{i}", str(exc)) from None
        index[raw["name"]] = i

    def ref(pin, where):
        if pin["cell"] not in index:
            raise SchemaError(where, f"unknown cell {pin['cell']!r}")
        return index[pin["cell"]], pin["pin"]

    nets = []
    for i, raw in enumerate(data["nets"]):
        source = ref(raw["source"], f"/nets/{i}/source")
        sinks = tuple(ref(s, f"/nets/{i}/sinks/{j}") for j, s in enumerate(raw["sinks"]))
        nets.append(Net(raw["name"], source, sinks))
    return NetlistDocument(tuple(cells), tuple(nets), data["device"], data["format_version"])


def dumps(doc: NetlistDocument) -> str:
    return json.dumps(to_dict(doc), indent=2, ensure_ascii=False) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path) -> NetlistDocument:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
    return from_dict(data)


def write_json(doc: NetlistDocument, path) -> None:
    atomic_write_text(path, dumps(doc))


def load_any(path, device_profile: Optional[object] = None) -> NetlistDocument:
    """Read ``.json`` interchange or ``.v`` Verilog (the latter needs a profile)."""
    path = Path(path)
    if path.suffix.lower() in (".v", ".vg", ".sv"):
        from .verilog import parse_verilog_subset

        return parse_verilog_subset(path.read_text(encoding="utf-8"), device_profile)
    return read_json(path)

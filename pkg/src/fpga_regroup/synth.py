"""Synthetic placed netlists with a planted word / module hierarchy.

Device: a 100 x 100 grid of ``SLICE_X<x>Y<y>`` sites. Tiles bucket sites
2 x 50 (``CLB_X<x//2>Y<y//50>``), clock regions 50 x 50 (``X<x//50>Y<y//50>``).

Each word is a column of ``word_width`` bit-slices (one site per bit, bit 0
at the bottom); the words of a module sit in consecutive tile columns.
Bit ``i`` of word ``k`` feeds bit ``i`` of word ``k + 1``; in
``carry_chain_word`` the carry of bit ``i`` also feeds bit ``i + 1``.

Placement jitter draws from numpy's PCG64 bit generator through
``random_raw`` only, so a (spec, seed) pair yields the same bytes on any
platform and numpy release.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis.distance import spatial_distance
from .ingest.jsonio import FORMAT_VERSION, NetlistDocument
from .ingest.location import DeviceProfile, parse_location, place
from .ingest.reference import ReferenceHierarchy
from .model import Cell, Net

GRID = (100, 100)
TILE_BUCKET = (2, 50)
REGION_BUCKET = (50, 50)
WORD_PITCH = 2  # one word per tile column
DEVICE = "synthetic-100x100"
PROFILE = DeviceProfile(tile_bucket=TILE_BUCKET, region_bucket=REGION_BUCKET, tile_prefix="CLB")
PATTERNS = ("ff_word", "lut_ff_word", "carry_chain_word")


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    module_count: int
    words_per_module: int
    word_width: int
    cell_pattern: str = "lut_ff_word"
    placement_noise: int = 0
    region_spread: bool = False
    seed: int = 0
    # layout knobs: sites between adjacent word columns, and between module
    # footprints in a row (None = spread modules over the whole grid)
    word_pitch: int = WORD_PITCH
    module_gap: Optional[int] = None

    def __post_init__(self):
        if min(self.module_count, self.words_per_module, self.word_width) < 1:
            raise SynthError("module_count, words_per_module and word_width must be >= 1")
        if self.cell_pattern not in PATTERNS:
            raise SynthError(f"cell_pattern must be one of {PATTERNS}, got {self.cell_pattern!r}")
        if self.placement_noise < 0:
            raise SynthError("placement_noise must be >= 0")
        if self.word_pitch < 1 or (self.module_gap is not None and self.module_gap < 0):
            raise SynthError("word_pitch must be >= 1 and module_gap >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise SynthError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"name", "description"}
        if unknown:
            raise SynthError(f"unknown SynthSpec fields: {sorted(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self) -> dict:
        return asdict(self)


class _Rng:
    def __init__(self, seed: int):
        self._bits = np.random.PCG64(seed)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on raw 64-bit draws."""
        limit = (1 << 64) - (1 << 64) % n
        while True:
            r = int(self._bits.random_raw())
            if r < limit:
                return r % n

    def jitter(self, noise: int) -> int:
        return self.below(2 * noise + 1) - noise if noise else 0


def _fit(start: int, size: int, bucket: int, limit: int) -> int:
    """Shift ``start`` so ``[start, start + size)`` stays inside one bucket when it can."""
    if size <= bucket and start // bucket != (start + size - 1) // bucket:
        start = (start + size - 1) // bucket * bucket
    return min(start, limit - size)


def _separation(anchors: list[tuple[int, int]], fw: int, fh: int) -> int:
    """Smallest weighted distance between module centres (default weights)."""
    centres = [place(f"SLICE_X{x + fw // 2}Y{y + fh // 2}", PROFILE) for x, y in anchors]
    return min((spatial_distance(a, b) for i, a in enumerate(centres) for b in centres[:i]), default=0)


def _grid_anchors(m: int, cols: int, rows: int, fw: int, fh: int) -> list[tuple[int, int]]:
    gx, gy = GRID
    rx, ry = REGION_BUCKET
    out = []
    for k in range(m):
        c, r = k % cols, k // cols
        x = round(c * (gx - fw) / (cols - 1)) if cols > 1 else 0
        y = round(r * (gy - fh) / (rows - 1)) if rows > 1 else 0
        out.append((_fit(x, fw, rx, gx), _fit(y, fh, ry, gy)))
    return out


def _overlapping(anchors, fw, fh) -> bool:
    boxes = [(x, y, x + fw, y + fh) for x, y in anchors]
    return any(a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]
               for i, a in enumerate(boxes) for b in boxes[:i])


def _anchors(spec: SynthSpec, fw: int, fh: int) -> list[tuple[int, int]]:
    gx, gy = GRID
    rx, ry = REGION_BUCKET
    m = spec.module_count
    if fw > gx or fh > gy:
        raise SynthError(f"module footprint {fw}x{fh} exceeds the {gx}x{gy} device grid")
    if spec.region_spread:
        per_row = gx // rx
        regions = per_row * (gy // ry)
        if m > regions:
            raise SynthError(f"region_spread needs one clock region per module; grid has {regions}, spec asks {m}")
        if fw > rx or fh > ry:
            raise SynthError(f"module footprint {fw}x{fh} does not fit in a {rx}x{ry} clock region")
        # each module in the corner of its region farthest from the grid centre
        out = []
        for k in range(m):
            cx, cy = k % per_row, k // per_row
            x = cx * rx if cx < per_row / 2 else (cx + 1) * rx - fw
            y = cy * ry if cy < (gy // ry) / 2 else (cy + 1) * ry - fh
            out.append((x, y))
        return out
    if spec.module_gap is not None:
        out, x, y = [], 0, 0
        for _ in range(m):
            if x + fw > gx:
                x, y = 0, y + fh + spec.module_gap
            if y + fh > gy:
                raise SynthError(f"{m} modules of footprint {fw}x{fh} exceed the {gx}x{gy} device grid")
            out.append((x, y))
            x += fw + spec.module_gap
        return out
    best = None
    for rows in range(1, m + 1):
        cols = -(-m // rows)
        if cols * fw > gx or rows * fh > gy:
            continue
        anchors = _grid_anchors(m, cols, rows, fw, fh)
        if _overlapping(anchors, fw, fh):
            continue
        sep = _separation(anchors, fw, fh)
        if best is None or sep > best[0]:
            best = (sep, anchors)
    if best is None:
        raise SynthError(f"{m} modules of footprint {fw}x{fh} exceed the {gx}x{gy} device grid")
    return best[1]


def _lut_init(rng: _Rng, k: int) -> str:
    width = 1 << k
    while True:
        v = rng.below(1 << width)
        if 0 < v < (1 << width) - 1:
            return format(v, f"0{width}b")


def generate(spec: SynthSpec) -> tuple[NetlistDocument, ReferenceHierarchy]:
    """Build the netlist and its planted reference hierarchy."""
    rng = _Rng(spec.seed)
    noise = spec.placement_noise
    fw = (spec.words_per_module - 1) * spec.word_pitch + 1 + 2 * noise
    fh = spec.word_width + 2 * noise
    anchors = _anchors(spec, fw, fh)

    base = {}
    for m, (ax, ay) in enumerate(anchors):
        for k in range(spec.words_per_module):
            for b in range(spec.word_width):
                base[(m, k, b)] = (ax + noise + k * spec.word_pitch, ay + noise + b)
    reserved = set(base.values())
    taken = set()
    sites = {}
    for key, (x, y) in base.items():
        jx, jy = rng.jitter(noise), rng.jitter(noise)
        cand = (x + jx, y + jy)
        if cand != (x, y) and (cand in reserved or cand in taken
                               or not (0 <= cand[0] < GRID[0] and 0 <= cand[1] < GRID[1])):
            cand = (x, y)
        taken.add(cand)
        sites[key] = cand
    if len(taken) != len(base):
        raise SynthError("bit-slices collide on the device grid")

    cells: list[Cell] = []
    word_label, module_label = {}, {}
    slice_cells = {}
    inits = {}
    for m in range(spec.module_count):
        for k in range(spec.words_per_module):
            if spec.cell_pattern != "ff_word":
                inits[(m, k)] = _lut_init(rng, 2)
            for b in range(spec.word_width):
                x, y = sites[(m, k, b)]
                placement = place(f"SLICE_X{x}Y{y}", PROFILE)
                reg = f"m{m}/w{k}_reg[{b}]"
                kinds = [("FDRE", reg, "")]
                if spec.cell_pattern == "lut_ff_word":
                    kinds = [("LUT2", f"{reg}_i_1", inits[(m, k)])] + kinds
                elif spec.cell_pattern == "carry_chain_word":
                    kinds = [("LUT2", f"{reg}_i_1", inits[(m, k)]), ("CARRY4", f"{reg}_i_2", "")] + kinds
                ids = {}
                for ctype, name, init in kinds:
                    cid = len(cells)
                    cells.append(Cell(cid, name, ctype, init, placement, name))
                    word_label[cid] = m * spec.words_per_module + k
                    module_label[cid] = m
                    ids[ctype] = cid
                slice_cells[(m, k, b)] = ids

    nets: list[Net] = []
    for m in range(spec.module_count):
        for k in range(spec.words_per_module):
            for b in range(spec.word_width):
                ids = slice_cells[(m, k, b)]
                name = f"m{m}/w{k}[{b}]"
                if "LUT2" in ids:
                    first = ids["CARRY4"] if "CARRY4" in ids else ids["FDRE"]
                    nets.append(Net(f"{name}_lut", (ids["LUT2"], "O"),
                                    ((first, "S[0]" if "CARRY4" in ids else "D"),)))
                if "CARRY4" in ids:
                    nets.append(Net(f"{name}_sum", (ids["CARRY4"], "O[0]"), ((ids["FDRE"], "D"),)))
                    if b + 1 < spec.word_width:
                        nxt = slice_cells[(m, k, b + 1)]["CARRY4"]
                        nets.append(Net(f"{name}_co", (ids["CARRY4"], "CO[0]"), ((nxt, "CI"),)))
                sinks = ()
                if k + 1 < spec.words_per_module:
                    nxt = slice_cells[(m, k + 1, b)]
                    sinks = ((nxt["LUT2"], "I0"),) if "LUT2" in nxt else ((nxt["FDRE"], "D"),)
                nets.append(Net(f"{name}_q", (ids["FDRE"], "Q"), sinks))

    doc = NetlistDocument(tuple(cells), tuple(nets), DEVICE, FORMAT_VERSION)
    return doc, ReferenceHierarchy(word_label, module_label)


def ablate_location(doc: NetlistDocument) -> NetlistDocument:
    """Collapse every placement to the origin while keeping site identity.

    Sites are renamed ``ABL<nnnnn>_X0Y0`` numbered in sorted original-name
    order, so site-level grouping and the lexicographic processing order are
    unchanged but every spatial distance is 0.
    """
    names = sorted({c.placement.site_name for c in doc.cells})
    width = max(5, len(str(len(names))))
    renamed = {s: f"ABL{i:0{width}d}_X0Y0" for i, s in enumerate(names)}
    cells = tuple(
        replace(c, placement=parse_location(renamed[c.placement.site_name], "ABL_X0Y0", "X0Y0"))
        for c in doc.cells
    )
    return replace(doc, cells=cells)


def reference_to_json(doc: NetlistDocument, ref: ReferenceHierarchy) -> dict:
    """Reference labels keyed by cell name."""
    names = [c.name for c in doc.cells]
    return {
        "word_label": {names[i]: g for i, g in ref.word_label.items()},
        "module_label": {names[i]: g for i, g in ref.module_label.items()},
    }


def load_spec(path) -> SynthSpec:
    return SynthSpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_specs(family: str = "planted") -> dict[str, SynthSpec]:
    """Shipped fixture specs of one family, keyed by file stem."""
    return {p.stem: load_spec(p) for p in sorted((FIXTURE_DIR / family).glob("*.json"))}

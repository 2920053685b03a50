"""Placed netlist data model: cells, nets, placement and the cell graph."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

LUT_TYPES = frozenset(f"LUT{k}" for k in range(1, 7))
FF_TYPES = frozenset({"FDRE", "FDSE", "FDCE", "FDPE"})
LATCH_TYPES = frozenset({"LDCE", "LDPE"})
CARRY_TYPES = frozenset({"CARRY4"})
MUX_TYPES = frozenset({"MUXF7", "MUXF8"})
RAM_TYPES = frozenset({
    "RAM32X1S", "RAM32X1D", "RAM64X1S", "RAM64X1D", "RAM128X1S", "RAM128X1D",
    "RAM256X1S", "RAM32M", "RAM64M", "RAMB18E1", "RAMB36E1",
})
SRL_TYPES = frozenset({"SRL16E", "SRLC16E", "SRLC32E"})

SUPPORTED_TYPES = (
    LUT_TYPES | FF_TYPES | LATCH_TYPES | CARRY_TYPES | MUX_TYPES | RAM_TYPES | SRL_TYPES
)

_DSP_RE = re.compile(r"^DSP48")


class NetlistError(ValueError):
    """Raised for malformed netlist content (bad references, rejected cells)."""


def is_dsp(cell_type: str) -> bool:
    return bool(_DSP_RE.match(cell_type))


def init_width(cell_type: str) -> Optional[int]:
    """Number of INIT bits for a LUT type, ``None`` for anything else."""
    if cell_type in LUT_TYPES:
        return 1 << int(cell_type[3:])
    return None


@dataclass(frozen=True)
class PlacementTriple:
    """Site, tile and clock-region grid coordinates of one placed element."""

    site_xy: tuple[int, int]
    tile_xy: tuple[int, int]
    clock_region_xy: tuple[int, int]
    site_name: str = ""
    tile_name: str = ""
    clock_region_name: str = ""
    slr_index: Optional[int] = None

    def __post_init__(self):
        for xy in (self.site_xy, self.tile_xy, self.clock_region_xy):
            if len(xy) != 2 or any(int(v) != v or v < 0 for v in xy):
                raise NetlistError(f"placement coordinates must be non-negative integer pairs, got {xy}")

    def coords(self) -> tuple[int, int, int, int, int, int]:
        return (*self.site_xy, *self.tile_xy, *self.clock_region_xy)


@dataclass(frozen=True)
class Cell:
    id: int
    name: str
    cell_type: str
    boolean_equation: str
    placement: PlacementTriple
    hier_name: Optional[str] = None

    def __post_init__(self):
        if is_dsp(self.cell_type):
            raise NetlistError(f"DSP cell {self.name!r} ({self.cell_type}) is not supported")


@dataclass(frozen=True)
class Net:
    """A net with one driving pin; ``source`` and ``sinks`` are (cell id, pin) pairs."""

    name: str
    source: tuple[int, str]
    sinks: tuple[tuple[int, str], ...] = ()

    @property
    def dangling(self) -> bool:
        return not self.sinks


@dataclass(frozen=True)
class NetlistGraph:
    """Labeled directed graph over cell ids.

    ``nodes`` and ``labels`` are aligned; ``edges`` holds (source, sink) id
    pairs. Parallel nets between one cell pair are a single edge.
    """

    nodes: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()
    edges: frozenset = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.nodes)

    def label_map(self) -> dict[int, str]:
        return dict(zip(self.nodes, self.labels))

    def shape_key(self) -> tuple:
        """Id-free description of the graph: labels in node order plus local edges.

        Two graphs with equal keys are identical up to renaming node ids, so
        the key can memoize any relabeling-invariant function (e.g. GED).
        """
        local = {n: i for i, n in enumerate(self.nodes)}
        return self.labels, tuple(sorted((local[u], local[v]) for u, v in self.edges))

    def to_networkx(self):
        import networkx as nx

        g = nx.DiGraph()
        for n, lab in zip(self.nodes, self.labels):
            g.add_node(n, label=lab)
        g.add_edges_from(self.edges)
        return g


def build_graph(cells: Iterable[Cell], nets: Iterable[Net]) -> NetlistGraph:
    """Directed source-to-sink cell graph with parallel edges collapsed."""
    cells = list(cells)
    valid = {c.id for c in cells}
    edges = set()
    for net in nets:
        src = net.source[0]
        if src not in valid:
            raise NetlistError(f"net {net.name!r}: source references unknown cell id {src}")
        for sink, _pin in net.sinks:
            if sink not in valid:
                raise NetlistError(f"net {net.name!r}: sink references unknown cell id {sink}")
            edges.add((src, sink))
    return NetlistGraph(
        nodes=tuple(c.id for c in cells),
        labels=tuple(c.cell_type for c in cells),
        edges=frozenset(edges),
    )


def induced_subgraph(g: NetlistGraph, ids: Iterable[int]) -> NetlistGraph:
    """Subgraph on ``ids`` keeping every edge with both endpoints inside.

    Node order follows ``ids`` as given.
    """
    ids = list(dict.fromkeys(ids))
    labels = g.label_map()
    unknown = [i for i in ids if i not in labels]
    if unknown:
        raise NetlistError(f"induced_subgraph: unknown node ids {unknown}")
    keep = set(ids)
    return NetlistGraph(
        nodes=tuple(ids),
        labels=tuple(labels[i] for i in ids),
        edges=frozenset((u, v) for u, v in g.edges if u in keep and v in keep),
    )

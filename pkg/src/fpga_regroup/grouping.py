"""Site-level and higher-level grouping of placed cells, plus net-to-word grouping."""

from __future__ import annotations

import json
import logging
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import DistanceWeights, GedBudget, GedCostModel, spatial_distance
from .analysis.ged import GraphShape, shape_edit_distance
from .model import Cell, NetlistGraph, PlacementTriple, induced_subgraph

log = logging.getLogger(__name__)

SITE_ORDERS = ("input_order", "lexicographic_site_name", "coordinate_raster")
THREADS_ENV = "FPGA_REGROUP_THREADS"


@dataclass(frozen=True)
class SiteGroup:
    index: int
    site_key: str
    cell_ids: tuple[int, ...]
    placement: PlacementTriple
    subgraph: NetlistGraph


@dataclass(frozen=True)
class HigherGroup:
    index: int
    members: tuple[SiteGroup, ...]

    def cell_ids(self) -> list[int]:
        return [cid for m in self.members for cid in m.cell_ids]


@dataclass(frozen=True)
class GroupingConfig:
    spatial_threshold: float = 100
    edit_threshold: float = 3
    weights: DistanceWeights = field(default_factory=DistanceWeights)
    ged_cost: GedCostModel = field(default_factory=GedCostModel)
    ged_budget: GedBudget = field(default_factory=GedBudget)
    site_order: str = "lexicographic_site_name"

    def __post_init__(self):
        if self.spatial_threshold < 0 or self.edit_threshold < 0:
            raise ValueError("thresholds must be non-negative")
        if self.site_order not in SITE_ORDERS:
            raise ValueError(f"site_order must be one of {SITE_ORDERS}, got {self.site_order!r}")

    def to_dict(self) -> dict:
        def num(x):
            return "inf" if x == float("inf") else x

        d = asdict(self)
        d["spatial_threshold"] = num(self.spatial_threshold)
        d["edit_threshold"] = num(self.edit_threshold)
        return d


@dataclass(frozen=True)
class WordGroup:
    nets: tuple[str, ...]
    signature: tuple[str, str]
    placement: PlacementTriple


def group_by_site(cells: Sequence[Cell], graph: Optional[NetlistGraph] = None) -> list[SiteGroup]:
    """One group per distinct site name, in order of first appearance.

    A cell joins the existing group whose site matches, else founds a new
    one; the dict lookup replaces the linear scan over groups (at most one
    group can match). Without ``graph`` the subgraphs carry no edges.
    """
    members: dict[str, list[Cell]] = {}
    for cell in cells:
        members.setdefault(cell.placement.site_name, []).append(cell)
    if graph is None:
        graph = NetlistGraph(tuple(c.id for c in cells), tuple(c.cell_type for c in cells), frozenset())
    groups = []
    for j, (site, group_cells) in enumerate(members.items()):
        ids = tuple(c.id for c in group_cells)
        groups.append(SiteGroup(j, site, ids, group_cells[0].placement, induced_subgraph(graph, ids)))
    return groups


def order_sites(sites: Sequence[SiteGroup], site_order: str) -> list[SiteGroup]:
    if site_order == "input_order":
        return list(sites)
    if site_order == "lexicographic_site_name":
        return sorted(sites, key=lambda s: s.site_key)
    if site_order == "coordinate_raster":
        return sorted(sites, key=lambda s: (s.placement.site_xy[1], s.placement.site_xy[0], s.site_key))
    raise ValueError(f"unknown site order {site_order!r}")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else ``FPGA_REGROUP_THREADS`` (0 = auto)."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


def group_higher(sites: Sequence[SiteGroup], cfg: GroupingConfig = GroupingConfig(),
                 threads: Optional[int] = None) -> list[HigherGroup]:
    """Greedy first-fit grouping of site groups under the two average-distance gates.

    Each site (in ``cfg.site_order``) is tested against the existing higher
    groups in creation order and joins the first one whose mean spatial
    distance and mean GED to all current members are both within threshold;
    otherwise it starts a new group. GED is skipped for groups that already
    fail the spatial gate.
    """
    ordered = order_sites(sites, cfg.site_order)
    n = len(ordered)
    if n == 0:
        return []
    coords = np.array([s.placement.coords() for s in ordered], dtype=np.int64)
    wvec = cfg.weights.vector()
    shapes = [GraphShape.of(s.subgraph) for s in ordered]

    group_of = np.full(n, -1, dtype=np.int64)
    members: list[list[int]] = []
    shape_counts: list[Counter] = []

    workers = resolve_threads(threads)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def mean_ged(i: int, g: int) -> float:
        counts = shape_counts[g]
        keys = list(counts)

        def one(sh):
            return shape_edit_distance(shapes[i], sh, cfg.ged_cost, cfg.ged_budget)[0]

        values = list(pool.map(one, keys)) if pool is not None and len(keys) > 1 else [one(k) for k in keys]
        total = 0.0
        for k, v in zip(keys, values):
            total += counts[k] * v
        return total / len(members[g])

    try:
        for i in range(n):
            placed = -1
            if members:
                done = group_of[:i]
                d = np.abs(coords[:i] - coords[i]) @ wvec
                sums = np.zeros(len(members), dtype=np.int64)
                np.add.at(sums, done, d)
                for g in range(len(members)):
                    if int(sums[g]) / len(members[g]) > cfg.spatial_threshold:
                        continue
                    if mean_ged(i, g) <= cfg.edit_threshold:
                        placed = g
                        break
            if placed < 0:
                placed = len(members)
                members.append([])
                shape_counts.append(Counter())
            members[placed].append(i)
            shape_counts[placed][shapes[i]] += 1
            group_of[i] = placed
    finally:
        if pool is not None:
            pool.shutdown()

    return [HigherGroup(k, tuple(ordered[i] for i in idx)) for k, idx in enumerate(members)]


def group_nets(doc, cfg: GroupingConfig = GroupingConfig()) -> list[WordGroup]:
    """First-fit grouping of nets (by name) on the driver's type, INIT and proximity.

    A net joins the first group whose signature matches its source cell's
    ``(cell_type, boolean_equation)`` and whose first member's source lies
    within ``cfg.spatial_threshold``.
    """
    cells = doc.cells
    groups: list[dict] = []
    skipped = []
    for net in sorted(doc.nets, key=lambda n: n.name):
        cid = net.source[0]
        if not 0 <= cid < len(cells):
            skipped.append(net.name)
            continue
        src = cells[cid]
        sig = (src.cell_type, src.boolean_equation)
        for g in groups:
            if g["signature"] == sig and spatial_distance(
                    g["placement"], src.placement, cfg.weights) <= cfg.spatial_threshold:
                g["nets"].append(net.name)
                break
        else:
            groups.append({"signature": sig, "placement": src.placement, "nets": [net.name]})
    if skipped:
        log.warning("group_nets: skipped %d nets with unresolvable source: %s", len(skipped), ", ".join(skipped))
    return [WordGroup(tuple(g["nets"]), g["signature"], g["placement"]) for g in groups]


def flatten_to_clustering(higher: Sequence[HigherGroup], n_cells: int) -> np.ndarray:
    """Position ``i`` holds the index of the higher group containing cell ``i``."""
    labels = np.full(n_cells, -1, dtype=np.int64)
    for k, g in enumerate(higher):
        for cid in g.cell_ids():
            labels[cid] = k
    missing = np.flatnonzero(labels < 0)
    if missing.size:
        raise ValueError(f"cells not covered by any higher group: {missing.tolist()}")
    return labels


@dataclass
class GroupingResult:
    sites: list[SiteGroup]
    higher: list[HigherGroup]
    words: list[WordGroup]
    labels: np.ndarray


def run_grouping(doc, cfg: GroupingConfig = GroupingConfig(), threads: Optional[int] = None,
                 with_words: bool = True) -> GroupingResult:
    sites = group_by_site(doc.cells, doc.graph())
    higher = group_higher(sites, cfg, threads)
    words = group_nets(doc, cfg) if with_words else []
    return GroupingResult(sites, higher, words, flatten_to_clustering(higher, len(doc.cells)))


def cluster_report(doc, result: GroupingResult, cfg: GroupingConfig) -> dict:
    names = [c.name for c in doc.cells]
    return {
        "config": cfg.to_dict(),
        "higher_groups": [
            {"id": g.index, "sites": [m.site_key for m in g.members], "cells": [names[c] for c in g.cell_ids()]}
            for g in result.higher
        ],
        "word_groups": [{"signature": list(w.signature), "nets": list(w.nets)} for w in result.words],
    }


def dumps_clusters(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def read_clusters(path) -> dict[str, int]:
    """Cell name -> higher-group id from a cluster output file."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    out = {}
    for g in data["higher_groups"]:
        for name in g["cells"]:
            if name in out:
                raise ValueError(f"cell {name!r} appears in more than one higher group")
            out[name] = int(g["id"])
    return out

"""Graph edit distance between small labeled directed graphs.

Exact A* search over node assignments for graphs up to
``GedBudget.exact_node_limit`` nodes; above that (or when the expansion
budget runs out) the cost of an assignment-derived edit path is returned as
an upper bound.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..model import NetlistGraph


@dataclass(frozen=True)
class GedCostModel:
    """Unit costs; substituting a node costs 0 when the cell types match."""

    node_insert: float = 1.0
    node_delete: float = 1.0
    node_substitute: float = 1.0
    edge_insert: float = 1.0
    edge_delete: float = 1.0
    edge_substitute: float = 0.0

    def __post_init__(self):
        if min(self.node_insert, self.node_delete, self.node_substitute,
               self.edge_insert, self.edge_delete, self.edge_substitute) < 0:
            raise ValueError("edit costs must be non-negative")


@dataclass(frozen=True)
class GedBudget:
    """``upper_bound_on_timeout=False`` lifts the expansion cap (exact at any cost)."""

    exact_node_limit: int = 8
    upper_bound_on_timeout: bool = True
    per_pair_node_budget: int = 100_000


@dataclass(frozen=True)
class GraphShape:
    labels: tuple
    edges: frozenset  # (i, j) local indices

    @classmethod
    def of(cls, g: NetlistGraph) -> "GraphShape":
        labels, edges = g.shape_key()
        return cls(labels, frozenset(edges))

    @property
    def n(self) -> int:
        return len(self.labels)


def edit_path_cost(g1: NetlistGraph, g2: NetlistGraph, mapping: Mapping[int, Optional[int]],
                   cost: GedCostModel = GedCostModel()) -> float:
    """Cost of the edit path induced by a node assignment.

    ``mapping`` sends each g1 node to a distinct g2 node or ``None`` (deleted);
    g2 nodes not in its image are inserted.
    """
    lab1, lab2 = g1.label_map(), g2.label_map()
    image = {v for v in mapping.values() if v is not None}
    if set(mapping) != set(lab1) or len(image) != sum(v is not None for v in mapping.values()):
        raise ValueError("mapping must cover every g1 node and be injective")
    total = 0.0
    for u, v in mapping.items():
        if v is None:
            total += cost.node_delete
        elif lab1[u] != lab2[v]:
            total += cost.node_substitute
    total += cost.node_insert * (len(lab2) - len(image))
    covered = set()
    for a, b in g1.edges:
        fa, fb = mapping[a], mapping[b]
        if fa is not None and fb is not None and (fa, fb) in g2.edges:
            total += cost.edge_substitute
            covered.add((fa, fb))
        else:
            total += cost.edge_delete
    total += cost.edge_insert * (len(g2.edges) - len(covered))
    return total


def _node_lb(c1: Counter, c2: Counter, cost: GedCostModel) -> float:
    a, b = sum(c1.values()), sum(c2.values())
    common = sum(min(c1[k], c2[k]) for k in c1)
    best = float("inf")
    for s in range(min(a, b) + 1):
        mism = max(0, s - common)
        best = min(best, mism * cost.node_substitute + (a - s) * cost.node_delete + (b - s) * cost.node_insert)
    return best


def _edge_lb(e1: int, e2: int, cost: GedCostModel) -> float:
    m = min(e1, e2)
    return min(e1 * cost.edge_delete + e2 * cost.edge_insert,
               m * cost.edge_substitute + (e1 - m) * cost.edge_delete + (e2 - m) * cost.edge_insert)


def _lower_bound(s1: GraphShape, s2: GraphShape, cost: GedCostModel) -> float:
    return _node_lb(Counter(s1.labels), Counter(s2.labels), cost) + _edge_lb(len(s1.edges), len(s2.edges), cost)


def _astar(s1: GraphShape, s2: GraphShape, cost: GedCostModel, max_expansions: Optional[int]):
    """Returns ``(cost, mapping)`` or ``None`` when the budget runs out."""
    n1, n2 = s1.n, s2.n
    deg = Counter()
    for a, b in s1.edges:
        deg[a] += 1
        deg[b] += 1
    order = sorted(range(n1), key=lambda i: (-deg[i], i))
    pos = {u: k for k, u in enumerate(order)}

    # edges of g1 touching order[k:], for every k
    e1_rem = [sum(1 for a, b in s1.edges if max(pos[a], pos[b]) >= k) for k in range(n1 + 1)]
    suffix_labels = [Counter(s1.labels[u] for u in order[k:]) for k in range(n1 + 1)]

    def heuristic(k, used):
        free = [j for j in range(n2) if not used >> j & 1]
        c2 = Counter(s2.labels[j] for j in free)
        e2_rem = sum(1 for a, b in s2.edges if not (used >> a & 1 and used >> b & 1))
        return _node_lb(suffix_labels[k], c2, cost) + _edge_lb(e1_rem[k], e2_rem, cost)

    def step(mp, k, x):
        u = order[k]
        if x < 0:
            c = cost.node_delete
        else:
            c = 0.0 if s1.labels[u] == s2.labels[x] else cost.node_substitute
        pairs = [(u, u, x, x)]
        for j in range(k):
            w, y = order[j], mp[j]
            pairs.append((u, w, x, y))
            pairs.append((w, u, y, x))
        for a, b, fa, fb in pairs:
            e1 = (a, b) in s1.edges
            if fa < 0 or fb < 0:
                if e1:
                    c += cost.edge_delete
                continue
            e2 = (fa, fb) in s2.edges
            if e1 and e2:
                c += cost.edge_substitute
            elif e1:
                c += cost.edge_delete
            elif e2:
                c += cost.edge_insert
        return c

    def completion(used):
        free = [j for j in range(n2) if not used >> j & 1]
        e = sum(1 for a, b in s2.edges if not (used >> a & 1 and used >> b & 1))
        return len(free) * cost.node_insert + e * cost.edge_insert

    tie = 0
    heap = [(heuristic(0, 0) if n1 else completion(0), tie, 0.0, (), 0, n1 == 0)]
    expansions = 0
    while heap:
        f, _, g, mp, used, done = heapq.heappop(heap)
        if done:
            mapping = {order[k]: (mp[k] if mp[k] >= 0 else None) for k in range(n1)}
            return f, mapping
        expansions += 1
        if max_expansions is not None and expansions > max_expansions:
            return None
        k = len(mp)
        for x in [j for j in range(n2) if not used >> j & 1] + [-1]:
            g2 = g + step(mp, k, x)
            nmp = mp + (x,)
            nused = used | (1 << x) if x >= 0 else used
            tie += 1
            if k + 1 == n1:
                total = g2 + completion(nused)
                heapq.heappush(heap, (total, tie, total, nmp, nused, True))
            else:
                heapq.heappush(heap, (g2 + heuristic(k + 1, nused), tie, g2, nmp, nused, False))
    raise AssertionError("A* exhausted the search space without a complete assignment")


def _bipartite_mapping(s1: GraphShape, s2: GraphShape, cost: GedCostModel) -> dict:
    """Node assignment from a linear assignment over local-structure costs."""
    n1, n2 = s1.n, s2.n
    out1, in1, out2, in2 = Counter(), Counter(), Counter(), Counter()
    loop1 = {a for a, b in s1.edges if a == b}
    loop2 = {a for a, b in s2.edges if a == b}
    for a, b in s1.edges:
        if a != b:
            out1[a] += 1
            in1[b] += 1
    for a, b in s2.edges:
        if a != b:
            out2[a] += 1
            in2[b] += 1

    def diff(p, q):
        return (max(0, p - q) * cost.edge_delete + max(0, q - p) * cost.edge_insert) / 2

    big = 1e9
    c = np.full((n1 + n2, n1 + n2), big)
    for i in range(n1):
        for j in range(n2):
            sub = 0.0 if s1.labels[i] == s2.labels[j] else cost.node_substitute
            loops = diff(int(i in loop1), int(j in loop2)) * 2
            c[i, j] = sub + diff(out1[i], out2[j]) + diff(in1[i], in2[j]) + loops
        c[i, n2 + i] = cost.node_delete + (out1[i] + in1[i]) * cost.edge_delete / 2 + (i in loop1) * cost.edge_delete
    for j in range(n2):
        c[n1 + j, j] = cost.node_insert + (out2[j] + in2[j]) * cost.edge_insert / 2 + (j in loop2) * cost.edge_insert
    c[n1:, n2:] = 0.0
    rows, cols = linear_sum_assignment(c)
    mapping = {}
    for r, col in zip(rows, cols):
        if r < n1:
            mapping[r] = int(col) if col < n2 else None
    return mapping


def _graph(s: GraphShape) -> NetlistGraph:
    return NetlistGraph(tuple(range(s.n)), s.labels, s.edges)


@lru_cache(maxsize=1 << 16)
def shape_edit_distance(s1: GraphShape, s2: GraphShape, cost: GedCostModel, budget: GedBudget) -> tuple[float, bool]:
    if s1 == s2:
        return 0.0, True
    lb = _lower_bound(s1, s2, cost)
    if max(s1.n, s2.n) <= budget.exact_node_limit:
        cap = budget.per_pair_node_budget if budget.upper_bound_on_timeout else None
        found = _astar(s1, s2, cost, cap)
        if found is not None:
            return float(found[0]), True
    ub = edit_path_cost(_graph(s1), _graph(s2), _bipartite_mapping(s1, s2, cost), cost)
    if ub <= lb:
        return float(ub), True
    if lb == 0 and _isomorphic(s1, s2):
        return 0.0, True
    return float(ub), False


def _isomorphic(s1: GraphShape, s2: GraphShape) -> bool:
    import networkx as nx
    from networkx.algorithms.isomorphism import categorical_node_match

    return nx.is_isomorphic(_graph(s1).to_networkx(), _graph(s2).to_networkx(),
                            node_match=categorical_node_match("label", None))


def graph_edit_distance(g1: NetlistGraph, g2: NetlistGraph, cost: GedCostModel = GedCostModel(),
                        budget: GedBudget = GedBudget()) -> tuple[float, bool]:
    """Edit distance between two labeled directed graphs.

    Returns
    -------
    (value, exact)
        ``exact`` is True when ``value`` is the minimum edit-path cost;
        otherwise ``value`` is the cost of one valid edit path.
    """
    return shape_edit_distance(GraphShape.of(g1), GraphShape.of(g2), cost, budget)


def optimal_edit_path(g1: NetlistGraph, g2: NetlistGraph, cost: GedCostModel = GedCostModel()):
    """``(cost, mapping)`` from an uncapped A* search, mapping in g1/g2 node ids."""
    s1, s2 = GraphShape.of(g1), GraphShape.of(g2)
    value, local = _astar(s1, s2, cost, None)
    return value, {g1.nodes[i]: (g2.nodes[j] if j is not None else None) for i, j in local.items()}

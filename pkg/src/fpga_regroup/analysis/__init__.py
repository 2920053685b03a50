"""Pairwise kernels behind higher-level grouping: spatial distance and GED."""

from __future__ import annotations

from typing import Sequence

from .distance import DistanceWeights, distances_to, spatial_distance
from .ged import GedBudget, GedCostModel, edit_path_cost, graph_edit_distance, optimal_edit_path


def average_pair_metrics(n_new, members: Sequence, weights: DistanceWeights = DistanceWeights(),
                         cost: GedCostModel = GedCostModel(), budget: GedBudget = GedBudget(),
                         executor=None) -> tuple[float, float]:
    """Mean spatial distance and mean GED from ``n_new`` to every member.

    ``n_new`` and ``members`` need ``placement`` and ``subgraph`` attributes
    (site groups). With an ``executor`` the GED calls run concurrently; the
    sums are still taken in member order.
    """
    if not members:
        raise ValueError("average_pair_metrics needs at least one member")
    spatial = sum(spatial_distance(n_new.placement, m.placement, weights) for m in members)

    def ged(m):
        return graph_edit_distance(n_new.subgraph, m.subgraph, cost, budget)[0]

    geds = list(executor.map(ged, members)) if executor is not None else [ged(m) for m in members]
    edit = 0.0
    for v in geds:
        edit += v
    return spatial / len(members), edit / len(members)


__all__ = [
    "DistanceWeights",
    "GedBudget",
    "GedCostModel",
    "average_pair_metrics",
    "distances_to",
    "edit_path_cost",
    "graph_edit_distance",
    "optimal_edit_path",
    "spatial_distance",
]

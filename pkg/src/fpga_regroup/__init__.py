"""Placement-aware reconstruction of word and module groupings in flattened FPGA netlists."""

from .analysis import (
    DistanceWeights,
    GedBudget,
    GedCostModel,
    average_pair_metrics,
    graph_edit_distance,
    spatial_distance,
)
from .grouping import (
    GroupingConfig,
    HigherGroup,
    SiteGroup,
    WordGroup,
    flatten_to_clustering,
    group_by_site,
    group_higher,
    group_nets,
    run_grouping,
)
from .ingest import (
    DeviceProfile,
    NetlistDocument,
    ReferenceHierarchy,
    extract_reference,
    parse_location,
    parse_verilog_subset,
    read_json,
    write_json,
)
from .metrics import PairwiseCounts, accuracy, entropy, mutual_information, nmi, pairwise_counts
from .model import Cell, Net, NetlistGraph, PlacementTriple, build_graph, induced_subgraph
from .synth import SynthSpec, ablate_location, generate

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "DeviceProfile",
    "DistanceWeights",
    "GedBudget",
    "GedCostModel",
    "GroupingConfig",
    "HigherGroup",
    "Net",
    "NetlistDocument",
    "NetlistGraph",
    "PairwiseCounts",
    "PlacementTriple",
    "ReferenceHierarchy",
    "SiteGroup",
    "SynthSpec",
    "WordGroup",
    "ablate_location",
    "accuracy",
    "average_pair_metrics",
    "build_graph",
    "entropy",
    "extract_reference",
    "flatten_to_clustering",
    "generate",
    "graph_edit_distance",
    "group_by_site",
    "group_higher",
    "group_nets",
    "induced_subgraph",
    "mutual_information",
    "nmi",
    "pairwise_counts",
    "parse_location",
    "parse_verilog_subset",
    "read_json",
    "run_grouping",
    "spatial_distance",
    "write_json",
]

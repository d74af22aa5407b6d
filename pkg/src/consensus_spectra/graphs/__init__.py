"""Communication graphs, example families and combinatorial metrics."""

from .core import (
    DirectedGraph,
    GraphError,
    GraphSchedule,
    NotStronglyConnectedError,
    PathFamily,
)
from .families import FAMILIES, barbell_positions, make_family, random_connected_graph, random_schedule
from .io import read_graph_file, read_schedule_file, write_graph_file
from .metrics import (
    BottleneckReport,
    bottleneck_measure,
    bottleneck_report,
    congestion,
    diameter,
    disjoint_path_family,
    edge_connectivity,
    geodesic_degree_sum_check,
    geodesic_family,
    k_diameter,
    normalized_diameter,
    normalized_diameter_k,
)

__all__ = [
    "DirectedGraph",
    "GraphError",
    "GraphSchedule",
    "NotStronglyConnectedError",
    "PathFamily",
    "FAMILIES",
    "barbell_positions",
    "make_family",
    "random_connected_graph",
    "random_schedule",
    "read_graph_file",
    "read_schedule_file",
    "write_graph_file",
    "BottleneckReport",
    "bottleneck_measure",
    "bottleneck_report",
    "congestion",
    "diameter",
    "disjoint_path_family",
    "edge_connectivity",
    "geodesic_degree_sum_check",
    "geodesic_family",
    "k_diameter",
    "normalized_diameter",
    "normalized_diameter_k",
]

"""Weighted graph core: representation, partitions, cuts and the edge-list format."""

from graphcore.cuts import conductance, cut_weight, part_conductances, partition_max_conductance
from graphcore.edge_list import (
    format_edge_list,
    from_edge_list,
    parse_edge_list,
    read_edge_list,
    to_edge_list,
    write_edge_list,
)
from graphcore.partition import UNASSIGNED, Partition, read_labels, write_labels
from graphcore.weighted_graph import WeightedGraph

__all__ = [
    "UNASSIGNED",
    "Partition",
    "WeightedGraph",
    "conductance",
    "cut_weight",
    "format_edge_list",
    "from_edge_list",
    "parse_edge_list",
    "part_conductances",
    "partition_max_conductance",
    "read_edge_list",
    "read_labels",
    "to_edge_list",
    "write_edge_list",
    "write_labels",
]

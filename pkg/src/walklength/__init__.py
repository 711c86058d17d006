"""Walk-length persistent homology for weighted directed graphs."""
from __future__ import annotations

from .digraph import WeightedDigraph, shortest_distance_digraph, symmetrize, validate
from .errors import WalkLengthError
from .filtrations import (
    FilteredComplex,
    dowker_sink_filtration,
    dowker_source_filtration,
    rips_filtration,
    walk_length_filtration,
)
from .metrics import bottleneck_distance, distance_matrix, network_distance, search_network_distance
from .persistence import PersistenceDiagram, compute_persistence

__all__ = [
    "WeightedDigraph",
    "shortest_distance_digraph",
    "symmetrize",
    "validate",
    "WalkLengthError",
    "FilteredComplex",
    "walk_length_filtration",
    "dowker_sink_filtration",
    "dowker_source_filtration",
    "rips_filtration",
    "PersistenceDiagram",
    "compute_persistence",
    "bottleneck_distance",
    "distance_matrix",
    "network_distance",
    "search_network_distance",
]

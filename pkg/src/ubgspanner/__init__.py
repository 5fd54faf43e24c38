"""Lightweight bounded-degree spanners of quasi unit ball graphs."""
from .geometry import (BandPolicy, GenerationError, UbgInstance, UsageError,
                       angle_from_distances, euclid, generate_instance,
                       validate_instance)
from .graph_core import (WeightedGraph, connected_components, dijkstra,
                         edge_stretch, mst_weight)
from .distsim import SimConfig, run_distributed
from .estimators import (DistributedGreedySpanner, RelaxedGreedySpanner,
                         SeqGreedySpanner)
from .greedy_baseline import seq_greedy
from .relaxed_greedy import PhaseParams, derive_params, run_relaxed_greedy
from .verify import check_spanner, verification_report

__version__ = "0.1.0"

__all__ = [
    "BandPolicy", "DistributedGreedySpanner", "GenerationError", "PhaseParams",
    "RelaxedGreedySpanner", "SeqGreedySpanner", "SimConfig", "UbgInstance", "UsageError",
    "WeightedGraph", "angle_from_distances", "check_spanner", "connected_components",
    "derive_params", "dijkstra", "edge_stretch", "euclid", "generate_instance",
    "mst_weight", "run_distributed", "run_relaxed_greedy", "seq_greedy",
    "validate_instance", "verification_report",
]

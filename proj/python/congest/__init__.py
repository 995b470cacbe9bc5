"""Distributed all-pairs shortest paths, simulated in the CONGEST model."""

from ._congest import (
    Edge,
    Graph,
    NegativeCycleError,
    ParseError,
    PreconditionError,
    distributed_bellman_ford,
    filtered_broadcast,
    generate_random_graph,
    johnson_reweight,
    las_vegas_verify,
    load_graph_file,
    load_graph_text,
    oracle_apsp,
    oracle_hop_bounded,
    run_apsp,
    sample_levels,
)

__all__ = [
    "Edge",
    "Graph",
    "NegativeCycleError",
    "ParseError",
    "PreconditionError",
    "distributed_bellman_ford",
    "filtered_broadcast",
    "generate_random_graph",
    "johnson_reweight",
    "las_vegas_verify",
    "load_graph_file",
    "load_graph_text",
    "oracle_apsp",
    "oracle_hop_bounded",
    "run_apsp",
    "sample_levels",
]

from .alignment import (AlignmentProblem, AlignmentResult, classical_nw, encode, required_bits,
                        temporal_nw, temporal_nw_run)
from .closure import (ClosureResult, closure, closure_bits, closure_run,
                      hop_limited_bellman_ford, minplus_bellman_ford)
from .dijkstra import (DijkstraResult, classical_dijkstra, recover_distances,
                       temporal_dijkstra, validate_tree)
from .graph import Graph, four_node_graph, parse_graph_file, parse_graph_text

__all__ = [
    "AlignmentProblem", "AlignmentResult", "classical_nw", "encode", "required_bits", "temporal_nw", "temporal_nw_run",
    "ClosureResult", "closure", "closure_bits", "closure_run", "hop_limited_bellman_ford",
    "minplus_bellman_ford",
    "DijkstraResult", "classical_dijkstra", "recover_distances", "temporal_dijkstra", "validate_tree",
    "Graph", "four_node_graph", "parse_graph_file", "parse_graph_text",
]

"""maxtsp: combinatorial 4/5-approximation for the maximum traveling
salesman problem, with exact small-instance oracles and a certifying
harness."""

from .graph import (
    CompleteGraph,
    CycleCover,
    HalfEdge,
    Infeasible,
    InstanceError,
    InternalError,
    Matching,
    MaxTSPError,
    Multigraph,
    NoPerfectMatching,
    NotKiteFree,
    UnhandledCase,
    build_complete_graph,
    is_vertex_disjoint_paths,
    multigraph_weight,
)

__version__ = "0.1.0"
__all__ = [
    "CompleteGraph",
    "CycleCover",
    "HalfEdge",
    "Infeasible",
    "InstanceError",
    "InternalError",
    "Matching",
    "MaxTSPError",
    "Multigraph",
    "NoPerfectMatching",
    "NotKiteFree",
    "UnhandledCase",
    "build_complete_graph",
    "is_vertex_disjoint_paths",
    "multigraph_weight",
    "__version__",
]

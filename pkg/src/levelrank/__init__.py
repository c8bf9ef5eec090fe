"""SCC/CAC graph partitioning and level-by-level non-normalized PageRank."""
from ._accel import BACKEND
from .engine import SolveReport, compute_pagerank, error_bound, propagate_weights
from .generate import GeneratorConfig, generate_ba, replicate
from .graph import Graph, GraphFormatError, VertexGroup, classify_vertices, edge_weight, parse_edge_list, serialize
from .partition import ComponentKind, Partition, find_components, reference_partition, scc_partition, validate_partition
from .schedule import Schedule, SolveUnit, UnitKind, build_schedule, export_reordered
from .solvers import (
    SolverError,
    SolverParams,
    oracle_r1_to_r3,
    solve_baseline,
    solve_cac,
    solve_large_scc,
    solve_singletons,
    solve_small_scc,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ComponentKind",
    "Graph",
    "GraphFormatError",
    "GeneratorConfig",
    "Partition",
    "Schedule",
    "SolveReport",
    "SolveUnit",
    "SolverError",
    "SolverParams",
    "UnitKind",
    "VertexGroup",
    "build_schedule",
    "classify_vertices",
    "compute_pagerank",
    "edge_weight",
    "error_bound",
    "export_reordered",
    "find_components",
    "generate_ba",
    "oracle_r1_to_r3",
    "parse_edge_list",
    "propagate_weights",
    "reference_partition",
    "replicate",
    "scc_partition",
    "serialize",
    "solve_baseline",
    "solve_cac",
    "solve_large_scc",
    "solve_singletons",
    "solve_small_scc",
    "validate_partition",
]

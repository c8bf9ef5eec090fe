"""Level-by-level PageRank over an SCC/CAC schedule."""
from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .graph import Graph
from .partition import Partition, find_components, scc_partition
from .schedule import DEFAULT_SMALL_THRESHOLD, CrossEdges, Schedule, UnitKind, build_schedule
from .solvers import SolverParams, solve_unit

log = logging.getLogger(__name__)

MODES = ("sequential", "parallel")


@dataclass
class UnitRecord:
    kind: str
    size: int
    level: int
    edges: int
    iterations: int
    edge_visits: int
    wall_time: float


@dataclass
class SolveReport:
    c: float
    tol: float
    keep_loops: bool
    mode: str
    threads: int
    small_threshold: int
    vertex_count: int = 0
    edge_count: int = 0
    level_count: int = 0
    units: list[UnitRecord] = field(default_factory=list)
    cross_edge_count: int = 0
    cross_edge_visits: int = 0
    census: dict = field(default_factory=dict)
    large_scc_vertices: int = 0
    eps_tot: float = 0.0
    eps_avg: float = 0.0
    wall_time: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def _sum(self, attr, kinds):
        return sum(getattr(u, attr) for u in self.units if u.kind in kinds)

    @property
    def total_iterations(self) -> int:
        return self._sum("iterations", ("scc_large",))

    @property
    def iter_edge_work(self) -> int:
        """Edge visits made by the iterative solver (iterations x intra edges)."""
        return self._sum("edge_visits", ("scc_large",))

    @property
    def single_pass_edge_work(self) -> int:
        """CAC and singleton-loop edges plus cross edges, each touched once."""
        return self._sum("edge_visits", ("cac", "singletons")) + self.cross_edge_visits

    @property
    def large_scc_edges(self) -> int:
        return self._sum("edges", ("scc_large",))

    @property
    def mean_iterations_per_edge(self) -> float:
        edges = self.large_scc_edges
        return self.iter_edge_work / edges if edges else 0.0

    def summary(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("units", "census")}
        out.update(
            units=len(self.units),
            total_iterations=self.total_iterations,
            iter_edge_work=self.iter_edge_work,
            single_pass_edge_work=self.single_pass_edge_work,
            large_scc_edges=self.large_scc_edges,
            mean_iterations_per_edge=self.mean_iterations_per_edge,
        )
        out.update({f"census_{k}": v for k, v in self.census.items()})
        for kind in UnitKind:
            out[f"units_{kind.value}"] = sum(1 for u in self.units if u.kind == kind.value)
        return out

    def to_text(self) -> str:
        lines = []
        for k, v in self.summary().items():
            if isinstance(v, list):
                v = "; ".join(v) if v else "none"
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = self.summary()
        data["unit_records"] = [asdict(u) for u in self.units]
        return json.dumps(data, indent=2)


def error_bound(large_scc_vertices: int, n: int, c: float, tol: float) -> tuple[float, float]:
    """Worst-case total and per-vertex error left by the iterative solver."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    eps_tot = large_scc_vertices * tol * c / (1.0 - c)
    return eps_tot, (eps_tot / n if n else 0.0)


def propagate_weights(cross: CrossEdges, ranks: np.ndarray, weights: np.ndarray, c: float) -> int:
    """Push finished ranks along cross edges into lower-level weights.

    Updates ``weights`` in place and returns the number of edges consumed.
    """
    return int(_kernels.propagate(cross.src, cross.dst, cross.src_outdeg, ranks, weights, c))


def compute_pagerank(
    g: Graph,
    w=None,
    params: SolverParams | None = None,
    mode: str = "sequential",
    threads: int | None = None,
    small_threshold: int = DEFAULT_SMALL_THRESHOLD,
    partition: Partition | None = None,
    schedule: Schedule | None = None,
):
    """Non-normalized PageRank of ``g``, solved one level at a time.

    Returns ``(ranks, report)``. ``w`` defaults to all ones.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    params = params or SolverParams()
    g = g.with_loop_policy(params.keep_loops)
    n = g.vertex_count
    threads = threads or os.cpu_count() or 1
    report = SolveReport(params.c, params.tol, params.keep_loops, mode, threads if mode == "parallel" else 1,
                         small_threshold, vertex_count=n, edge_count=g.edge_count)
    weights = np.ones(n) if w is None else np.array(w, dtype=np.float64)
    if weights.shape != (n,):
        raise ValueError(f"weight vector has shape {weights.shape}, expected ({n},)")
    if (weights < 0).any():
        raise ValueError("weights must be non-negative")
    if n == 0:
        return np.zeros(0), report
    if not weights.any():
        report.warnings.append("all weights are zero; ranks are identically zero")

    t0 = time.perf_counter()
    p = partition if partition is not None else find_components(g)
    s = schedule if schedule is not None else build_schedule(g, p, small_threshold)
    report.level_count = len(s.levels)
    report.census = p.census()
    report.census["level_count_plain_scc"] = scc_partition(g).level_count
    report.cross_edge_count = s.cross_edge_count

    ranks = np.zeros(n)

    def run(unit):
        start = time.perf_counter()
        local, it, visits = solve_unit(unit, weights[unit.vertices], params)
        ranks[unit.vertices] = local
        return UnitRecord(unit.kind.value, unit.size, unit.level, unit.edge_count, it, visits,
                          time.perf_counter() - start)

    pool = ThreadPoolExecutor(max_workers=threads) if mode == "parallel" else None
    try:
        for lv in s.levels:
            if pool is None or len(lv.units) == 1:
                records = [run(u) for u in lv.units]
            else:
                records = list(pool.map(run, lv.units))
            report.units.extend(records)
            report.cross_edge_visits += propagate_weights(lv.cross, ranks, weights, params.c)
    finally:
        if pool is not None:
            pool.shutdown()

    report.large_scc_vertices = sum(u.size for u in report.units if u.kind == UnitKind.SCC_LARGE.value)
    report.eps_tot, report.eps_avg = error_bound(report.large_scc_vertices, n, params.c, params.tol)
    report.wall_time = time.perf_counter() - t0
    log.debug("solved %d units over %d levels in %.3fs", len(report.units), report.level_count, report.wall_time)
    return ranks, report

"""Per-component PageRank solvers, the whole-graph baseline and dense oracles.

All ranks here are non-normalized: ``R = (I - c A^T)^{-1} W`` with ``A`` the
row-normalized adjacency (dangling rows left at zero).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .graph import Graph
from .schedule import SolveUnit, UnitKind


class SolverError(RuntimeError):
    """Internal inconsistency: a cycle inside a CAC, a stalled iteration, ..."""


@dataclass(frozen=True)
class SolverParams:
    c: float = 0.85
    tol: float = 1e-9
    keep_loops: bool = False

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"damping c must lie in (0, 1), got {self.c}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")

    @property
    def max_iterations(self) -> int:
        bound = math.ceil(math.log(self.tol) / math.log(self.c))
        return 10 * max(bound, 1)


class PowerSeriesResult(NamedTuple):
    ranks: np.ndarray
    iterations: int
    l1_trace: np.ndarray
    min_increment_trace: np.ndarray
    non_monotone: int


class OracleR1Result(NamedTuple):
    r1: np.ndarray
    d: float
    r3: np.ndarray


def _as_weights(w, n) -> np.ndarray:
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"weight vector has shape {w.shape}, expected ({n},)")
    return w


def solve_singletons(unit: SolveUnit, w, params: SolverParams) -> np.ndarray:
    w = _as_weights(w, unit.size)
    ranks = w.copy()
    if params.keep_loops and unit.edge_count:
        src, dst = unit.local_edges()
        looped = src[src == dst]
        ranks[looped] = w[looped] / (1.0 - params.c / unit.out_degree[looped])
    return ranks


def cac_propagate(unit: SolveUnit, w, params: SolverParams) -> tuple[np.ndarray, int]:
    """CAC ranks plus the number of intra edges touched."""
    w = _as_weights(w, unit.size)
    ranks, visits, processed = _kernels.cac_propagate(
        unit.offsets, unit.targets, unit.out_degree, w, params.c, params.keep_loops
    )
    if processed != unit.size:
        raise SolverError(f"cycle in CAC: {unit.size - processed} vertices never reached in-degree 0")
    return ranks, int(visits)


def solve_cac(unit: SolveUnit, w, params: SolverParams) -> np.ndarray:
    return cac_propagate(unit, w, params)[0]


def dense_system(offsets, targets, out_degree, c, keep_loops=True) -> np.ndarray:
    """``I - c A^T`` for a local CSR block."""
    n = offsets.shape[0] - 1
    src = np.repeat(np.arange(n), np.diff(offsets))
    keep = np.ones(src.shape[0], bool) if keep_loops else src != targets
    mat = np.eye(n)
    np.add.at(mat, (targets[keep], src[keep]), -c / out_degree[src[keep]])
    return mat


def solve_small_scc(unit: SolveUnit, w, params: SolverParams) -> np.ndarray:
    w = _as_weights(w, unit.size)
    mat = dense_system(unit.offsets, unit.targets, unit.out_degree, params.c, params.keep_loops)
    try:
        ranks = np.linalg.solve(mat, w)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"dense factorization failed: {exc}") from exc
    if not np.isfinite(ranks).all():
        raise SolverError("dense factorization produced non-finite ranks")
    return ranks


def power_series(offsets, targets, out_degree, w, params: SolverParams) -> PowerSeriesResult:
    rank, it, converged, l1, mins, non_mono = _kernels.power_series(
        offsets, targets, out_degree, w, params.c, params.tol, params.max_iterations
    )
    if not converged:
        raise SolverError(f"power series did not converge within {params.max_iterations} iterations")
    return PowerSeriesResult(rank, int(it), l1, mins, int(non_mono))


def solve_large_scc(unit: SolveUnit, w, params: SolverParams) -> tuple[np.ndarray, int]:
    res = power_series(unit.offsets, unit.targets, unit.out_degree, _as_weights(w, unit.size), params)
    return res.ranks, res.iterations


def solve_unit(unit: SolveUnit, w, params: SolverParams) -> tuple[np.ndarray, int, int]:
    """Dispatch on unit kind. Returns ``(ranks, iterations, edge_visits)``."""
    if unit.kind is UnitKind.SINGLETONS:
        return solve_singletons(unit, w, params), 0, unit.edge_count
    if unit.kind is UnitKind.CAC:
        ranks, visits = cac_propagate(unit, w, params)
        return ranks, 0, visits
    if unit.kind is UnitKind.SCC_SMALL:
        return solve_small_scc(unit, w, params), 0, 0
    ranks, it = solve_large_scc(unit, w, params)
    return ranks, it, it * unit.edge_count


def solve_baseline_trace(g: Graph, w, params: SolverParams) -> PowerSeriesResult:
    g = g.with_loop_policy(params.keep_loops)
    offsets, targets = g.rank_csr
    return power_series(offsets, targets, g.out_degree, _as_weights(w, g.vertex_count), params)


def solve_baseline(g: Graph, w, params: SolverParams) -> tuple[np.ndarray, int]:
    res = solve_baseline_trace(g, w, params)
    return res.ranks, res.iterations


def dense_solve(g: Graph, w, c: float, keep_loops: bool | None = None) -> np.ndarray:
    """Exact ``(I - c A^T)^{-1} W`` for a whole (small) graph."""
    keep = g.keep_loops if keep_loops is None else keep_loops
    g = g.with_loop_policy(keep)
    mat = dense_system(g.out_offsets, g.out_targets, np.maximum(g.out_degree, 1), c, keep)
    return np.linalg.solve(mat, _as_weights(w, g.vertex_count))


def oracle_r1_to_r3(g: Graph, w, c: float, tol: float = 1e-14, max_iter: int = 200_000) -> OracleR1Result:
    """Classical eigenvector PageRank, rescaled to the non-normalized form."""
    n = g.vertex_count
    W = _as_weights(w, n)
    total = W.sum()
    if total <= 0:
        raise ValueError("weights must have positive mass")
    wn = W / total
    deg = g.out_degree
    offsets, targets = g.rank_csr
    A = np.zeros((n, n))
    src = np.repeat(np.arange(n), np.diff(offsets))
    np.add.at(A, (src, targets), 1.0 / deg[src])
    dangling = (deg == 0).astype(float)
    M = c * (A + np.outer(dangling, wn)).T + (1.0 - c) * np.outer(wn, np.ones(n))
    r = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = M @ r
        nxt /= nxt.sum()
        if np.abs(nxt - r).sum() < tol:
            r = nxt
            break
        r = nxt
    else:
        raise SolverError("eigenvector iteration did not converge")
    d = 1.0 - (c * A.T @ r).sum()
    return OracleR1Result(r, float(d), r * total / d)

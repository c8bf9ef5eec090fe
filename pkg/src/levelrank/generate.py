"""Synthetic graphs: directed Barabasi-Albert and replicated graphs.

Randomness comes from numpy's PCG64 generator only, and kernels consume
pre-drawn uniforms, so a seed gives the same graph on either backend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph


def keep_count(degree: int, rule: str = "log2") -> int:
    """Out-edges kept for a vertex of undirected degree ``degree``.

    ``rule`` is ``"log2"`` (ceil of log2), ``"all"`` or ``"fixed:K"``.
    """
    degree = int(degree)
    if degree <= 0:
        return 0
    if rule == "log2":
        return (degree - 1).bit_length()
    if rule == "all":
        return degree
    if rule.startswith("fixed:"):
        return min(int(rule.split(":", 1)[1]), degree)
    raise ValueError(f"unknown keep rule {rule!r}")


def keep_counts(degrees: np.ndarray, rule: str = "log2") -> np.ndarray:
    degrees = np.asarray(degrees, dtype=np.int64)
    if rule == "log2":
        # smallest k with 2**k >= d, exact for all int64 degrees
        return np.searchsorted(2 ** np.arange(63, dtype=np.int64), np.maximum(degrees, 1))
    return np.array([keep_count(d, rule) for d in degrees.tolist()], dtype=np.int64)


ORIENTATIONS = ("originating", "degree")


def _check_rule(rule):
    keep_count(2, rule)


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    m: int = 12
    seed_size: int = 20
    seed_mean_degree: float = 5.0
    keep_rule: str = "log2"
    rng_seed: int = 0
    orientation: str = "originating"

    def __post_init__(self):
        if self.seed_size < 2:
            raise ValueError("seed_size must be at least 2")
        if not 1 <= self.m <= self.seed_size:
            raise ValueError("need 1 <= m <= seed_size")
        if self.n < self.seed_size:
            raise ValueError("n must be at least seed_size")
        if not 0 < self.seed_mean_degree <= self.seed_size - 1:
            raise ValueError("seed_mean_degree must lie in (0, seed_size - 1]")
        _check_rule(self.keep_rule)
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")


def _connected(k, eu, ev) -> bool:
    parent = np.arange(k)
    depth = np.ones(k, np.int64)
    for a, b in zip(eu.tolist(), ev.tolist()):
        _kernels.uf_union(parent, depth, a, b)
    roots = {int(_kernels.uf_find(parent, i)) for i in range(k)}
    return len(roots) == 1


def seed_graph(rng: np.random.Generator, k: int, mean_degree: float):
    """Connected G(k, p) graph with expected mean degree ``mean_degree``."""
    p = mean_degree / (k - 1)
    iu, ju = np.triu_indices(k, 1)
    while True:
        pick = rng.random(iu.shape[0]) < p
        eu, ev = iu[pick], ju[pick]
        if _connected(k, eu, ev):
            return eu.astype(np.int64), ev.astype(np.int64)


def undirected_ba(config: GeneratorConfig, rng: np.random.Generator):
    """Undirected preferential-attachment edge arrays ``(u, v)``."""
    eu, ev = seed_graph(rng, config.seed_size, config.seed_mean_degree)
    n, m, k = config.n, config.m, config.seed_size
    total = eu.shape[0] + (n - k) * m
    out_src = np.empty(total, np.int64)
    out_dst = np.empty(total, np.int64)
    out_src[: eu.shape[0]] = ev
    out_dst[: eu.shape[0]] = eu
    out_len = eu.shape[0]
    pool = np.empty(2 * total, np.int64)
    pool[0: 2 * out_len: 2] = eu
    pool[1: 2 * out_len: 2] = ev
    pool_len = 2 * out_len
    v = k
    while v < n:
        uniforms = rng.random(max(1024, int((n - v) * m * 1.05)))
        v, pool_len, out_len, _ = _kernels.ba_attach(
            pool, pool_len, v, n, m, uniforms, out_src, out_dst, out_len
        )
    return out_src, out_dst


def assign_creators(config: GeneratorConfig, eu, ev, rng):
    """Reorder each edge as ``(creator, other)``.

    Attached edges already are; seed edges get a creator by coin flip.
    """
    eu, ev = eu.copy(), ev.copy()
    seed_edges = eu.shape[0] - (config.n - config.seed_size) * config.m
    flip = np.flatnonzero(rng.random(seed_edges) < 0.5)
    eu[flip], ev[flip] = ev[flip], eu[flip]
    return eu, ev


def keep_originated(src, dst, keep, rng):
    """Keep ``keep[i]`` edges chosen uniformly among those with ``src == i``."""
    order = np.lexsort((rng.random(src.shape[0]), src))
    s = src[order]
    starts = np.searchsorted(s, s, side="left")
    chosen = order[np.arange(s.shape[0]) - starts < keep[s]]
    return src[chosen], dst[chosen]


def generate_ba(config: GeneratorConfig) -> Graph:
    """Directed Barabasi-Albert graph.

    With ``orientation="originating"`` each vertex keeps
    ``keep_rule(edges it created)`` of the edges it created on arrival, so
    edges point from newer to older vertices; seed edges get a random
    creator. With ``"degree"`` each vertex keeps ``keep_rule(undirected
    degree)`` of all its incident edges. Unkept edges are dropped.
    """
    rng = np.random.Generator(np.random.PCG64(config.rng_seed))
    eu, ev = undirected_ba(config, rng)
    n = config.n
    if config.orientation == "originating":
        eu, ev = assign_creators(config, eu, ev, rng)
        keep = keep_counts(np.bincount(eu, minlength=n), config.keep_rule)
        src, dst = keep_originated(eu, ev, keep, rng)
        return Graph.from_edges(n, src, dst)
    degree = np.bincount(eu, minlength=n) + np.bincount(ev, minlength=n)
    keep = keep_counts(degree, config.keep_rule)
    uniforms = rng.random(int(keep.sum()))
    src, dst = _kernels.direct_edges(n, eu, ev, keep, uniforms)
    return Graph.from_edges(n, src, dst)


def replicate(g: Graph, copies: int, bridges: int = 0, rng_seed: int = 0) -> Graph:
    """Disjoint union of ``copies`` relabeled copies plus random bridge edges."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    if bridges and copies < 2:
        raise ValueError("bridges need at least two copies")
    n = g.vertex_count
    if bridges and n == 0:
        raise ValueError("cannot bridge empty graphs")
    shift = np.repeat(np.arange(copies, dtype=np.int64) * n, g.edge_count)
    src = np.tile(g.sources, copies) + shift
    dst = np.tile(g.out_targets, copies) + shift
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    extra = set()
    while len(extra) < bridges:
        a, b = rng.integers(0, copies, size=2)
        if a == b:
            continue
        u, v = rng.integers(0, n, size=2)
        extra.add((int(a * n + u), int(b * n + v)))
    if extra:
        pairs = np.array(sorted(extra), dtype=np.int64)
        src = np.concatenate([src, pairs[:, 0]])
        dst = np.concatenate([dst, pairs[:, 1]])
    return Graph.from_edges(n * copies, src, dst, g.keep_loops)


def powerlaw_slope(in_degree: np.ndarray, min_degree: int = 10) -> float:
    """Least-squares slope of log CCDF vs log degree over degrees >= ``min_degree``."""
    deg = np.asarray(in_degree)
    values = np.unique(deg[deg >= min_degree])
    if values.shape[0] < 2:
        return math.nan
    ccdf = np.array([(deg >= x).mean() for x in values])
    slope, _ = np.polyfit(np.log(values), np.log(ccdf), 1)
    return float(slope)

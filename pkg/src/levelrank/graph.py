"""Directed graph in compressed out-adjacency form."""
from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np


class GraphFormatError(ValueError):
    """Malformed edge-list input."""


class VertexGroup(enum.IntEnum):
    G1 = 1  # isolated
    G2 = 2  # dangling: in, no out
    G3 = 3  # root: out, no in
    G4 = 4  # in and out, on no non-loop cycle
    G5 = 5  # on a non-loop cycle


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple digraph.

    Edge weights are implicit: edge ``(u, v)`` carries ``1 / out_degree[u]``.
    Self-loops are always stored; ``keep_loops`` decides whether they count
    for ranking (component finding ignores them either way).
    """

    vertex_count: int
    out_offsets: np.ndarray
    out_targets: np.ndarray
    keep_loops: bool = False
    labels: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_edges(cls, n, src, dst, keep_loops=False, labels=None):
        """Build from parallel ``src``/``dst`` arrays; duplicates are dropped."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst differ in length")
        n = int(n)
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        if src.size:
            key = np.unique(src * n + dst)
            src, dst = np.divmod(key, n) if n else (key, key)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(n, offsets, dst.astype(np.int64, copy=False), bool(keep_loops), labels)

    def with_loop_policy(self, keep_loops):
        if bool(keep_loops) == self.keep_loops:
            return self
        return Graph(self.vertex_count, self.out_offsets, self.out_targets, bool(keep_loops), self.labels)

    @property
    def edge_count(self) -> int:
        return int(self.out_targets.shape[0])

    @cached_property
    def sources(self) -> np.ndarray:
        """Source vertex of every stored edge, aligned with ``out_targets``."""
        return np.repeat(np.arange(self.vertex_count, dtype=np.int64), np.diff(self.out_offsets))

    @cached_property
    def loop_mask(self) -> np.ndarray:
        return self.sources == self.out_targets

    @cached_property
    def has_loop(self) -> np.ndarray:
        flags = np.zeros(self.vertex_count, dtype=bool)
        flags[self.sources[self.loop_mask]] = True
        return flags

    @cached_property
    def out_degree(self) -> np.ndarray:
        """Rank out-degree: self-loops count only when ``keep_loops``."""
        deg = np.diff(self.out_offsets)
        if not self.keep_loops:
            deg = deg - self.has_loop
        return deg

    @cached_property
    def in_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """``(in_offsets, in_sources)`` mirror of the out-adjacency."""
        order = np.argsort(self.out_targets, kind="stable")
        offsets = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.out_targets, minlength=self.vertex_count), out=offsets[1:])
        return offsets, self.sources[order]

    @cached_property
    def rank_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Out-adjacency with self-loops removed unless ``keep_loops``."""
        if self.keep_loops or not self.loop_mask.any():
            return self.out_offsets, self.out_targets
        keep = ~self.loop_mask
        offsets = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.sources[keep], minlength=self.vertex_count), out=offsets[1:])
        return offsets, self.out_targets[keep]

    def successors(self, u) -> np.ndarray:
        return self.out_targets[self.out_offsets[u]:self.out_offsets[u + 1]]

    def edges(self) -> Iterable[tuple[int, int]]:
        return zip(self.sources.tolist(), self.out_targets.tolist())

    def has_edge(self, u, v) -> bool:
        row = self.successors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.shape[0] and row[i] == v)


def edge_weight(g: Graph, u: int, v: int) -> float | None:
    """Normalized weight ``1/outdeg(u)`` of edge ``(u, v)``, None for non-edges."""
    if not g.has_edge(u, v):
        return None
    if u == v and not g.keep_loops:
        return None
    return 1.0 / int(g.out_degree[u])


def parse_edge_list(stream: TextIO | str, dense_ids: bool = True, keep_loops: bool = False) -> Graph:
    """Read ``src<TAB>dst`` lines; ``#`` lines are comments.

    With ``dense_ids`` the vertex count is ``max id + 1``; otherwise ids are
    compacted to ``0..k-1`` and the originals kept in ``Graph.labels``.
    """
    text = stream if isinstance(stream, str) else stream.read()
    lines = text.splitlines()
    rows = []
    linenos = []
    for i, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        rows.append(s)
        linenos.append(i)
    if not rows:
        raise GraphFormatError("empty edge list")
    tokens = " ".join(rows).split()
    values = None
    if len(tokens) == 2 * len(rows):
        try:
            values = np.array(tokens, dtype=np.int64)
        except (ValueError, OverflowError):
            values = None
    if values is None or (values < 0).any():
        for s, ln in zip(rows, linenos):
            parts = s.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise GraphFormatError(f"line {ln}: expected 'src<TAB>dst', got {s!r}")
        raise GraphFormatError("malformed edge list")  # pragma: no cover
    src, dst = values[0::2], values[1::2]
    if dense_ids:
        n = int(max(src.max(), dst.max())) + 1
        return Graph.from_edges(n, src, dst, keep_loops)
    labels, inverse = np.unique(values, return_inverse=True)
    inverse = inverse.reshape(-1)
    return Graph.from_edges(labels.shape[0], inverse[0::2], inverse[1::2], keep_loops, labels)


def read_edge_list(path, dense_ids: bool = True, keep_loops: bool = False) -> Graph:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_edge_list(fh, dense_ids=dense_ids, keep_loops=keep_loops)


def serialize(g: Graph, stream: TextIO | None = None) -> str | None:
    """Write one ``src\\tdst`` line per edge (LF endings, no comments)."""
    labels = g.labels
    src, dst = g.sources, g.out_targets
    if labels is not None:
        src, dst = labels[src], labels[dst]
    buf = io.StringIO() if stream is None else stream
    for u, v in zip(src.tolist(), dst.tolist()):
        buf.write(f"{u}\t{v}\n")
    return buf.getvalue() if stream is None else None


def classify_vertices(g: Graph, scc_membership) -> np.ndarray:
    """Label each vertex G1..G5, ignoring self-loops.

    ``scc_membership`` flags vertices inside an SCC of two or more vertices.
    """
    on_cycle = np.asarray(scc_membership, dtype=bool)
    keep = ~g.loop_mask
    has_out = np.zeros(g.vertex_count, dtype=bool)
    has_in = np.zeros(g.vertex_count, dtype=bool)
    has_out[g.sources[keep]] = True
    has_in[g.out_targets[keep]] = True
    groups = np.full(g.vertex_count, int(VertexGroup.G4), dtype=np.int8)
    groups[~has_in & ~has_out] = VertexGroup.G1
    groups[has_in & ~has_out] = VertexGroup.G2
    groups[~has_in & has_out] = VertexGroup.G3
    groups[on_cycle] = VertexGroup.G5
    return groups

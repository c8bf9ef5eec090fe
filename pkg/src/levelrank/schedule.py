"""Turn a partition into per-level solve units and cross-level edge buckets."""
from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

from ._kernels import counting_order
from .graph import Graph
from .partition import ComponentKind, Partition

DEFAULT_SMALL_THRESHOLD = 100


class UnitKind(enum.Enum):
    SINGLETONS = "singletons"
    CAC = "cac"
    SCC_SMALL = "scc_small"
    SCC_LARGE = "scc_large"


@dataclass(frozen=True, eq=False)
class SolveUnit:
    """One component (or one level's batch of 1-vertex components).

    ``offsets``/``targets`` are a local CSR over ``vertices`` (global ids in
    ascending order); ``out_degree`` is each member's global rank out-degree.
    """

    kind: UnitKind
    level: int
    vertices: np.ndarray
    offsets: np.ndarray
    targets: np.ndarray
    out_degree: np.ndarray
    keep_loops: bool

    @property
    def size(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.targets.shape[0])

    def local_edges(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.size, dtype=np.int64), np.diff(self.offsets))
        return src, self.targets


@dataclass(frozen=True, eq=False)
class CrossEdges:
    src: np.ndarray
    dst: np.ndarray
    src_outdeg: np.ndarray

    def __len__(self):
        return int(self.src.shape[0])


@dataclass(frozen=True, eq=False)
class Level:
    level: int
    units: list[SolveUnit]
    cross: CrossEdges


@dataclass(frozen=True, eq=False)
class Schedule:
    levels: list[Level]
    order: np.ndarray = field(repr=False)
    position: np.ndarray = field(repr=False)
    small_threshold: int = DEFAULT_SMALL_THRESHOLD
    dropped_loops: int = 0

    @property
    def units(self) -> list[SolveUnit]:
        return [u for lv in self.levels for u in lv.units]

    @property
    def cross_edge_count(self) -> int:
        return sum(len(lv.cross) for lv in self.levels)

    @property
    def intra_edge_count(self) -> int:
        return sum(u.edge_count for u in self.units)


def _desc_order(values, base=None):
    """Stable order by descending non-negative ints, refining ``base``."""
    values = np.asarray(values, dtype=np.int64)
    if base is None:
        base = np.arange(values.shape[0], dtype=np.int64)
    if values.shape[0] == 0:
        return base
    top = int(values.max())
    return base[counting_order(top - values[base], top + 1)]


def build_schedule(g: Graph, p: Partition, small_threshold: int = DEFAULT_SMALL_THRESHOLD) -> Schedule:
    if small_threshold < 1:
        raise ValueError("small_threshold must be at least 1")
    n = g.vertex_count
    ncomp = p.component_count
    single = p.size == 1

    # unit table: one unit per multi-vertex component, one per level for singletons
    multi = np.flatnonzero(~single)
    single_levels, first_single = np.unique(p.level[single], return_index=True)
    single_ids = np.flatnonzero(single)
    group_size = np.bincount(p.level[single], minlength=(p.max_level + 1) if ncomp else 0)
    unit_level = np.concatenate([p.level[multi], single_levels]).astype(np.int64)
    unit_size = np.concatenate([p.size[multi], group_size[single_levels]]).astype(np.int64)
    unit_first = np.concatenate([multi, single_ids[first_single]]).astype(np.int64)
    unit_comp_kind = np.concatenate([p.kind[multi], np.zeros(single_levels.shape[0], np.int8)])
    nunits = unit_level.shape[0]

    rank = counting_order(unit_first, max(ncomp, 1))
    rank = _desc_order(unit_size, rank)
    rank = _desc_order(unit_level, rank)
    unit_rank = np.empty(nunits, dtype=np.int64)
    unit_rank[rank] = np.arange(nunits)

    unit_of_comp = np.empty(ncomp, dtype=np.int64)
    unit_of_comp[multi] = unit_rank[: multi.shape[0]]
    level_slot = np.full(group_size.shape[0], -1, dtype=np.int64)
    level_slot[single_levels] = unit_rank[multi.shape[0]:]
    unit_of_comp[single] = level_slot[p.level[single]]

    # ranked unit attributes
    r_level = unit_level[rank]
    r_size = unit_size[rank]
    r_kind = unit_comp_kind[rank]
    r_start = np.zeros(nunits + 1, dtype=np.int64)
    np.cumsum(r_size, out=r_start[1:])

    vunit = unit_of_comp[p.comp_of] if n else np.zeros(0, np.int64)
    slots = counting_order(vunit, max(nunits, 1))
    pos = np.empty(n, dtype=np.int64)
    pos[slots] = np.arange(n)
    local = pos - r_start[vunit]

    src, dst = g.sources, g.out_targets
    loops = g.loop_mask
    csrc, cdst = p.comp_of[src], p.comp_of[dst]
    intra = (csrc == cdst) & ~loops
    if g.keep_loops:
        intra |= loops
    cross = csrc != cdst
    dropped = int(loops.sum()) if not g.keep_loops else 0

    isrc, idst = src[intra], dst[intra]
    iorder = counting_order(vunit[isrc], max(nunits, 1))
    isrc, idst = isrc[iorder], idst[iorder]
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(pos[isrc], minlength=n), out=row_offsets[1:])
    local_targets = local[idst]
    outdeg = g.out_degree

    units = []
    for r in range(nunits):
        a, b = r_start[r], r_start[r + 1]
        verts = slots[a:b]
        offs = row_offsets[a:b + 1] - row_offsets[a]
        tg = local_targets[row_offsets[a]:row_offsets[b]]
        if r_kind[r] == 0:
            kind = UnitKind.SINGLETONS
        elif r_kind[r] == ComponentKind.CAC:
            kind = UnitKind.CAC
        elif r_size[r] < small_threshold:
            kind = UnitKind.SCC_SMALL
        else:
            kind = UnitKind.SCC_LARGE
        units.append(SolveUnit(kind, int(r_level[r]), verts, offs, tg, outdeg[verts], g.keep_loops))

    xsrc, xdst = src[cross], dst[cross]
    xlevel = p.level[csrc[cross]]
    xorder = counting_order(xlevel, p.max_level + 1 if ncomp else 1)
    xsrc, xdst, xlevel = xsrc[xorder], xdst[xorder], xlevel[xorder]
    xbounds = np.searchsorted(xlevel, np.arange(p.max_level + 2 if ncomp else 1))

    levels = []
    r = 0
    while r < nunits:
        L = int(r_level[r])
        s = r
        while r < nunits and r_level[r] == L:
            r += 1
        a, b = xbounds[L], xbounds[L + 1]
        levels.append(Level(L, units[s:r], CrossEdges(xsrc[a:b], xdst[a:b], outdeg[xsrc[a:b]])))

    # display permutation: level desc, component size desc, component id, vertex id
    vorder = counting_order(p.comp_of, max(ncomp, 1)) if n else np.zeros(0, np.int64)
    vorder = _desc_order(p.size[p.comp_of], vorder)
    vorder = _desc_order(p.level[p.comp_of], vorder)
    position = np.empty(n, dtype=np.int64)
    position[vorder] = np.arange(n)
    return Schedule(levels, vorder, position, small_threshold, dropped)


def export_reordered(g: Graph, s: Schedule, stream=None):
    """Edge coordinates under the schedule's vertex permutation.

    Returns ``(rows, cols)`` arrays; with ``stream`` also writes TSV lines.
    """
    rows = s.position[g.sources]
    cols = s.position[g.out_targets]
    if stream is not None:
        buf = io.StringIO()
        for r, c in zip(rows.tolist(), cols.tolist()):
            buf.write(f"{r}\t{c}\n")
        stream.write(buf.getvalue())
    return rows, cols

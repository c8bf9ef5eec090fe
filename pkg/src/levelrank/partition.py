"""SCC/CAC partitioning.

``find_components`` runs the linear-time modified Tarjan DFS kernel;
``reference_partition`` rebuilds the same partition the slow, literal way and
serves as the oracle for it.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph


class ComponentKind(enum.IntEnum):
    SCC = _kernels.KIND_SCC
    CAC = _kernels.KIND_CAC


@dataclass(frozen=True, eq=False)
class Partition:
    comp_of: np.ndarray
    kind: np.ndarray
    level: np.ndarray
    size: np.ndarray

    @property
    def component_count(self) -> int:
        return int(self.kind.shape[0])

    @property
    def max_level(self) -> int:
        return int(self.level.max()) if self.level.size else 0

    @property
    def level_count(self) -> int:
        return int(np.unique(self.level).shape[0])

    def vertex_level(self) -> np.ndarray:
        return self.level[self.comp_of]

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.comp_of, kind="stable")
        return np.split(order, np.cumsum(self.size)[:-1]) if self.size.size else []

    def canonical(self) -> frozenset:
        """Id-free form: ``{(sorted members, kind, level)}``."""
        return frozenset(
            (tuple(m.tolist()), int(self.kind[c]), int(self.level[c]))
            for c, m in enumerate(self.members())
        )

    def census(self) -> dict:
        scc = self.kind == ComponentKind.SCC
        cac = ~scc
        return {
            "vertices": int(self.comp_of.shape[0]),
            "components": self.component_count,
            "scc_count": int(scc.sum()),
            "cac_count": int(cac.sum()),
            "singleton_cac_count": int((cac & (self.size == 1)).sum()),
            "largest_component": int(self.size.max()) if self.size.size else 0,
            "largest_component_kind": (
                ComponentKind(int(self.kind[int(np.argmax(self.size))])).name if self.size.size else None
            ),
            "cac_vertices": int(self.size[cac].sum()),
            "max_level": self.max_level,
            "level_count": self.level_count,
        }


@dataclass(frozen=True)
class DfsCounters:
    explore_edge_visits: int
    merge_edge_visits: int
    finish_calls: int


def _run(g: Graph, merge: bool):
    comp_of, kind, level, size, counters = _kernels.dfs_partition(
        g.vertex_count, g.out_offsets, g.out_targets, merge
    )
    return Partition(comp_of, kind, level, size), DfsCounters(*(int(x) for x in counters))


def find_components(g: Graph, return_counters: bool = False):
    """Unique SCC/CAC partition with component levels (minimum level 0)."""
    p, counters = _run(g, True)
    return (p, counters) if return_counters else p


def scc_partition(g: Graph) -> Partition:
    """Plain SCC partition (no CAC merging), size-1 SCCs labelled CAC."""
    return _run(g, False)[0]


# -- reference implementation ----------------------------------------------

def _adjacency(g: Graph) -> list[list[int]]:
    out = [[] for _ in range(g.vertex_count)]
    for u, v in g.edges():
        if u != v:
            out[u].append(v)
    return out


def kosaraju(n: int, adj: list[list[int]]) -> list[int]:
    """Textbook two-pass SCC labelling (iterative)."""
    radj = [[] for _ in range(n)]
    for u in range(n):
        for v in adj[u]:
            radj[v].append(u)
    seen = [False] * n
    order = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack = [(s, iter(adj[s]))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, iter(adj[v])))
                    break
            else:
                stack.pop()
                order.append(u)
    label = [-1] * n
    c = 0
    for s in reversed(order):
        if label[s] >= 0:
            continue
        label[s] = c
        todo = [s]
        while todo:
            u = todo.pop()
            for v in radj[u]:
                if label[v] < 0:
                    label[v] = c
                    todo.append(v)
        c += 1
    return label


def _longest_path_levels(n_comp: int, cedges: set) -> list[int]:
    succ = [[] for _ in range(n_comp)]
    indeg = [0] * n_comp
    for a, b in cedges:
        succ[a].append(b)
        indeg[b] += 1
    order = [c for c in range(n_comp) if indeg[c] == 0]
    for c in order:
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                order.append(d)
    if len(order) != n_comp:
        raise RuntimeError("condensation has a cycle")
    level = [0] * n_comp
    for c in reversed(order):
        level[c] = max((level[d] + 1 for d in succ[c]), default=0)
    return level


def _resolve(alias, c):
    while c in alias:
        c = alias[c]
    return c


def reference_partition(g: Graph) -> Partition:
    """Literal bottom-up merge of 1-vertex heads on the SCC condensation.

    Levels are recomputed from scratch after every round of merges and a
    level is revisited until no head on it can merge.
    """
    n = g.vertex_count
    adj = _adjacency(g)
    label = kosaraju(n, adj)
    groups: dict[int, set] = {}
    for v, c in enumerate(label):
        groups.setdefault(c, set()).add(v)
    is_scc = {c: len(vs) > 1 for c, vs in groups.items()}
    owner = list(label)

    level_no = 1
    while True:
        ids = sorted(groups)
        dense = {c: i for i, c in enumerate(ids)}
        cedges = {
            (dense[owner[u]], dense[owner[v]])
            for u in range(n) for v in adj[u] if owner[u] != owner[v]
        }
        lv = _longest_path_levels(len(ids), cedges)
        level_of = {c: lv[dense[c]] for c in ids}
        if level_no > max(lv, default=0):
            break
        merges = []
        for c in ids:
            if is_scc[c] or len(groups[c]) != 1 or level_of[c] != level_no:
                continue
            (v,) = groups[c]
            below = {owner[w] for w in adj[v] if level_of[owner[w]] == level_no - 1}
            if any(is_scc[d] for d in below) or not below:
                continue
            merges.append((c, below))
        if not merges:
            level_no += 1
            continue
        alias = {}
        for head, below in merges:
            keep = _resolve(alias, head)
            for d in below:
                d = _resolve(alias, d)
                if d == keep:
                    continue
                for w in groups.pop(d):
                    owner[w] = keep
                    groups[keep].add(w)
                is_scc.pop(d)
                alias[d] = keep

    comp_of = np.empty(n, dtype=np.int64)
    kind = np.empty(len(ids), dtype=np.int8)
    level = np.empty(len(ids), dtype=np.int64)
    size = np.empty(len(ids), dtype=np.int64)
    for i, c in enumerate(ids):
        comp_of[list(groups[c])] = i
        kind[i] = ComponentKind.SCC if is_scc[c] else ComponentKind.CAC
        level[i] = level_of[c]
        size[i] = len(groups[c])
    return Partition(comp_of, kind, level, size)


# -- validation -------------------------------------------------------------

def validate_partition(g: Graph, p: Partition) -> list[str]:
    """Violated partition invariants, as human-readable strings (empty = ok)."""
    problems = []
    n = g.vertex_count
    if p.comp_of.shape != (n,):
        return [f"comp_of has shape {p.comp_of.shape}, expected ({n},)"]
    ncomp = p.component_count
    if n and (p.comp_of.min() < 0 or p.comp_of.max() >= ncomp):
        return ["component id out of range"]
    counts = np.bincount(p.comp_of, minlength=ncomp)
    if not np.array_equal(counts, p.size):
        problems.append("component sizes disagree with membership")
    if (counts == 0).any():
        problems.append("empty component")

    adj = _adjacency(g)
    scc_label = kosaraju(n, adj)
    scc_groups = Counter(scc_label)
    comp_of = p.comp_of.tolist()

    # SCCs of size >= 2 must be exactly the SCC-kind components
    first_comp = {}
    for v, s in enumerate(scc_label):
        if scc_groups[s] < 2:
            if p.kind[comp_of[v]] != ComponentKind.CAC:
                problems.append(f"vertex {v} is on no cycle but sits in an SCC component")
            continue
        c = first_comp.setdefault(s, comp_of[v])
        if comp_of[v] != c:
            problems.append(f"SCC containing vertex {v} is split across components")
        if p.kind[c] != ComponentKind.SCC:
            problems.append(f"cycle vertex {v} placed in a CAC")
    for c in np.flatnonzero(p.kind == ComponentKind.SCC):
        if p.size[c] < 2:
            problems.append(f"component {c} is a 1-vertex SCC")
    scc_comp_sizes = Counter(first_comp.values())
    for c, k in scc_comp_sizes.items():
        if k != 1:
            problems.append(f"component {c} merges several SCCs")
        elif p.size[c] != sum(1 for v in range(n) if comp_of[v] == c and scc_groups[scc_label[v]] >= 2):
            problems.append(f"component {c} mixes SCC and non-SCC vertices")

    # CAC weak connectivity (acyclicity is covered by the SCC check above)
    und = [[] for _ in range(n)]
    for u in range(n):
        for v in adj[u]:
            if comp_of[u] == comp_of[v]:
                und[u].append(v)
                und[v].append(u)
    seen_comp = set()
    for v in range(n):
        c = comp_of[v]
        if c in seen_comp or p.kind[c] != ComponentKind.CAC:
            continue
        seen_comp.add(c)
        reach = {v}
        todo = [v]
        while todo:
            u = todo.pop()
            for w in und[u]:
                if w not in reach:
                    reach.add(w)
                    todo.append(w)
        if len(reach) != p.size[c]:
            problems.append(f"CAC {c} is not weakly connected")

    # condensation, levels and cross-edge direction
    cedges = {(comp_of[u], comp_of[v]) for u in range(n) for v in adj[u] if comp_of[u] != comp_of[v]}
    try:
        lv = _longest_path_levels(ncomp, cedges)
    except RuntimeError:
        problems.append("condensation is not acyclic")
        return problems
    for c in range(ncomp):
        if lv[c] != p.level[c]:
            problems.append(f"component {c} has level {p.level[c]}, longest path is {lv[c]}")
    for a, b in cedges:
        if p.level[a] <= p.level[b]:
            problems.append(f"cross edge from component {a} (level {p.level[a]}) to {b} (level {p.level[b]})")

    plain = scc_partition(g)
    if p.max_level > plain.max_level:
        problems.append(f"max level {p.max_level} exceeds plain SCC max level {plain.max_level}")

    # maximality: no 1-vertex CAC head may still be mergeable
    for c in np.flatnonzero((p.kind == ComponentKind.CAC) & (p.size == 1)):
        v = int(np.flatnonzero(p.comp_of == c)[0])
        L = int(p.level[c])
        below = {comp_of[w] for w in adj[v] if p.level[comp_of[w]] == L - 1}
        if below and all(p.kind[d] == ComponentKind.CAC for d in below):
            problems.append(f"1-vertex CAC {c} (vertex {v}) can still merge into level {L - 1}")
    return problems


def format_census(g: Graph, p: Partition, plain: Partition | None = None) -> str:
    """Structured text report of a partition."""
    cen = p.census()
    plain = plain if plain is not None else scc_partition(g)
    hist_size = Counter(p.size.tolist())
    hist_level = Counter(p.level.tolist())
    lines = [
        f"{cen['scc_count']} SCCs, {cen['cac_count']} CACs ({cen['singleton_cac_count']} singleton), "
        f"max level {cen['max_level']}",
        f"vertices: {g.vertex_count}",
        f"edges: {g.edge_count}",
        f"scc_count: {cen['scc_count']}",
        f"cac_count: {cen['cac_count']}",
        f"singleton_cac_count: {cen['singleton_cac_count']}",
        f"cac_vertices: {cen['cac_vertices']}",
        f"largest_component: {cen['largest_component']} ({cen['largest_component_kind']})",
        f"max_level: {cen['max_level']}",
        f"levels: {cen['level_count']}",
        f"levels_plain_scc: {plain.level_count}",
        "size_histogram: " + " ".join(f"{k}:{hist_size[k]}" for k in sorted(hist_size)),
        "level_histogram: " + " ".join(f"{k}:{hist_level[k]}" for k in sorted(hist_level)),
    ]
    return "\n".join(lines) + "\n"

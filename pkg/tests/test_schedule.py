import io

import numpy as np
import pytest

from graphs import EXAMPLE8_NAMES, from_pairs, random_digraph
from levelrank import UnitKind, build_schedule, export_reordered, find_components


def named(vertices):
    return "".join(EXAMPLE8_NAMES[v] for v in vertices)


def test_example8_units(example8_graph):
    s = build_schedule(example8_graph, find_components(example8_graph), small_threshold=100)
    assert [lv.level for lv in s.levels] == [2, 1, 0]
    layout = [[(u.kind, named(u.vertices)) for u in lv.units] for lv in s.levels]
    assert layout == [
        [(UnitKind.SINGLETONS, "A")],
        [(UnitKind.SCC_SMALL, "BD")],
        [(UnitKind.CAC, "CEF"), (UnitKind.SCC_SMALL, "GH")],
    ]


def test_example8_cross_edges(example8_graph):
    s = build_schedule(example8_graph, find_components(example8_graph))
    cross = {lv.level: sorted(zip(named(lv.cross.src), named(lv.cross.dst))) for lv in s.levels}
    assert cross == {2: [("A", "B"), ("A", "C")], 1: [("B", "F"), ("B", "G")], 0: []}
    top = s.levels[0].cross
    assert top.src_outdeg.tolist() == [2, 2]
    assert s.cross_edge_count == 4
    assert s.intra_edge_count == 7


def test_small_threshold_switches_to_iterative(example8_graph):
    s = build_schedule(example8_graph, find_components(example8_graph), small_threshold=2)
    kinds = {named(u.vertices): u.kind for u in s.units}
    assert kinds["BD"] is UnitKind.SCC_LARGE
    assert kinds["GH"] is UnitKind.SCC_LARGE
    with pytest.raises(ValueError):
        build_schedule(example8_graph, find_components(example8_graph), small_threshold=0)


def test_edgeless_graph_one_singleton_unit():
    g = from_pairs(5, [])
    s = build_schedule(g, find_components(g))
    assert len(s.levels) == 1
    (unit,) = s.levels[0].units
    assert unit.kind is UnitKind.SINGLETONS
    assert unit.vertices.tolist() == [0, 1, 2, 3, 4]
    assert s.cross_edge_count == 0


def test_singletons_grouped_per_level():
    # 0 and 1 feed the 2-cycle {2, 3}, so neither can merge; 4 is isolated
    g = from_pairs(5, [(0, 2), (1, 2), (2, 3), (3, 2), (4, 4)])
    s = build_schedule(g, find_components(g))
    singles = [u for u in s.units if u.kind is UnitKind.SINGLETONS]
    assert [u.vertices.tolist() for u in singles] == [[0, 1], [4]]


def test_loops_dropped_or_kept():
    g = from_pairs(2, [(0, 0), (0, 1)])
    s = build_schedule(g, find_components(g))
    assert s.dropped_loops == 1
    assert s.intra_edge_count == 1
    kept = g.with_loop_policy(True)
    s = build_schedule(kept, find_components(kept))
    assert s.dropped_loops == 0
    assert s.intra_edge_count == 2


def check_schedule(g, p, s):
    # every non-loop edge lands in exactly one place
    loops = int(g.loop_mask.sum())
    assert s.intra_edge_count + s.cross_edge_count == g.edge_count - loops
    seen = set()
    for lv in s.levels:
        for u in lv.units:
            assert u.level == lv.level
            src, dst = u.local_edges()
            for a, b in zip(u.vertices[src].tolist(), u.vertices[dst].tolist()):
                assert p.comp_of[a] == p.comp_of[b]
                seen.add((a, b))
            assert np.array_equal(u.out_degree, g.out_degree[u.vertices])
            assert (np.diff(u.vertices) > 0).all()
        for a, b in zip(lv.cross.src.tolist(), lv.cross.dst.tolist()):
            assert p.level[p.comp_of[a]] == lv.level > p.level[p.comp_of[b]]
            seen.add((a, b))
    assert seen == {(a, b) for a, b in g.edges() if a != b}
    # levels descend, sizes within a level do not grow
    levels = [lv.level for lv in s.levels]
    assert levels == sorted(levels, reverse=True)
    for lv in s.levels:
        sizes = [u.size for u in lv.units]
        assert sizes == sorted(sizes, reverse=True)
    covered = np.concatenate([u.vertices for u in s.units])
    assert sorted(covered.tolist()) == list(range(g.vertex_count))


def test_random_schedules_are_consistent(rng):
    for _ in range(100):
        n = int(rng.integers(1, 60))
        g = random_digraph(rng, n, float(rng.uniform(0.01, 0.1)), loops=True)
        p = find_components(g)
        check_schedule(g, p, build_schedule(g, p, small_threshold=int(rng.integers(1, 6))))


def test_permutation_is_block_ordered(rng):
    g = random_digraph(rng, 80, 0.03)
    p = find_components(g)
    s = build_schedule(g, p)
    assert sorted(s.order.tolist()) == list(range(80))
    assert np.array_equal(s.position[s.order], np.arange(80))
    lv = p.level[p.comp_of[s.order]]
    assert (np.diff(lv) <= 0).all()
    # each component occupies a contiguous block
    comp = p.comp_of[s.order]
    starts = np.flatnonzero(np.r_[True, comp[1:] != comp[:-1]])
    assert starts.shape[0] == p.component_count


def test_reordered_matrix_is_block_lower_triangular(rng):
    g = random_digraph(rng, 60, 0.04)
    p = find_components(g)
    s = build_schedule(g, p)
    out = io.StringIO()
    rows, cols = export_reordered(g, s, out)
    assert len(out.getvalue().splitlines()) == g.edge_count
    # an edge u->v puts v at or after u's block in the order
    block_start = {}
    for i, v in enumerate(s.order.tolist()):
        block_start.setdefault(int(p.comp_of[v]), i)
    for r, c in zip(rows.tolist(), cols.tolist()):
        ru = block_start[int(p.comp_of[s.order[r]])]
        rv = block_start[int(p.comp_of[s.order[c]])]
        assert rv >= ru

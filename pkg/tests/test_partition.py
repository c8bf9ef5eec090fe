import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphs import all_digraphs, canonical_named, cycle, edge_list, example8, from_pairs, random_dag, random_digraph
from levelrank import ComponentKind, Partition, find_components, reference_partition, scc_partition, validate_partition
from levelrank import _kernels
from levelrank.partition import format_census, kosaraju

EXAMPLE8_EXPECTED = {
    (("B", "D"), ComponentKind.SCC, 1),
    (("G", "H"), ComponentKind.SCC, 0),
    (("C", "E", "F"), ComponentKind.CAC, 0),
    (("A",), ComponentKind.CAC, 2),
}


def relabel(g, perm):
    src, dst = g.sources, g.out_targets
    return from_pairs(g.vertex_count, zip(perm[src].tolist(), perm[dst].tolist()))


def unrelabel(canon, perm):
    inv = np.argsort(perm)
    return frozenset((tuple(sorted(inv[list(m)].tolist())), k, lv) for m, k, lv in canon)


def test_example8_partition():
    p = find_components(example8())
    assert canonical_named(p) == EXAMPLE8_EXPECTED
    assert p.max_level == 2
    assert scc_partition(example8()).max_level == 3


def test_example8_census_text(example8_graph):
    text = format_census(example8_graph, find_components(example8_graph))
    assert text.splitlines()[0] == "2 SCCs, 2 CACs (1 singleton), max level 2"


def test_empty_and_edgeless():
    p = find_components(from_pairs(0, []))
    assert p.component_count == 0
    p = find_components(from_pairs(3, []))
    assert p.component_count == 3
    assert (p.kind == ComponentKind.CAC).all()
    assert (p.level == 0).all()


def test_self_loops_are_ignored():
    with_loops = find_components(from_pairs(3, [(0, 0), (0, 1), (1, 2), (2, 2)]))
    plain = find_components(from_pairs(3, [(0, 1), (1, 2)]))
    assert with_loops.canonical() == plain.canonical()


def test_chain_collapses_to_one_cac():
    p = find_components(from_pairs(4, [(0, 1), (1, 2), (2, 3)]))
    assert p.component_count == 1
    assert p.kind[0] == ComponentKind.CAC
    assert scc_partition(from_pairs(4, [(0, 1), (1, 2), (2, 3)])).max_level == 3


def test_single_edge_levels_strictly_drop():
    g = from_pairs(2, [(0, 1)])
    assert find_components(g).max_level == 0
    assert scc_partition(g).max_level == 1


def test_scc_neighbour_blocks_merge():
    # 0 feeds the 2-cycle {1,2} and the sink 3; the cycle vetoes the merge
    g = from_pairs(4, [(0, 1), (1, 2), (2, 1), (0, 3)])
    canon = find_components(g).canonical()
    assert canon == {((0,), ComponentKind.CAC, 1), ((1, 2), ComponentKind.SCC, 0), ((3,), ComponentKind.CAC, 0)}
    assert validate_partition(g, find_components(g)) == []


def test_forced_merge_of_a():
    # dropping B->G and D->B turns the top of the example into one CAC
    idx = "ABCDEFGH".index
    pairs = [("A", "B"), ("A", "C"), ("B", "D"), ("B", "F"), ("C", "E"), ("C", "F"), ("E", "F"), ("G", "H"), ("H", "G")]
    g = from_pairs(8, [(idx(a), idx(b)) for a, b in pairs])
    got = canonical_named(find_components(g))
    assert (("A", "B", "C", "D", "E", "F"), ComponentKind.CAC, 0) in got


def test_exhaustive_three_vertex_graphs():
    for g in all_digraphs(3):
        assert find_components(g).canonical() == reference_partition(g).canonical(), edge_list(g)


@pytest.mark.slow
def test_exhaustive_four_vertex_graphs():
    for g in all_digraphs(4):
        p = find_components(g)
        assert p.canonical() == reference_partition(g).canonical(), edge_list(g)


def test_random_graphs_match_reference(rng):
    for _ in range(300):
        n = int(rng.integers(1, 25))
        g = random_digraph(rng, n, float(rng.uniform(0.02, 0.3)), loops=True)
        p = find_components(g)
        assert p.canonical() == reference_partition(g).canonical(), edge_list(g)
        assert validate_partition(g, p) == []


def test_random_dags_are_all_cac(rng):
    for _ in range(50):
        g = random_dag(rng, int(rng.integers(1, 60)), 0.1)
        p = find_components(g)
        assert (p.kind == ComponentKind.CAC).all()
        assert validate_partition(g, p) == []


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=30),
        st.permutations(range(n)),
    )
))
def test_relabeling_invariance(case):
    n, pairs, perm = case
    perm = np.array(perm)
    g = from_pairs(n, pairs)
    base = find_components(g).canonical()
    moved = find_components(relabel(g, perm)).canonical()
    assert unrelabel(moved, perm) == base


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
))
def test_never_more_levels_than_plain_scc(case):
    n, pairs = case
    g = from_pairs(n, pairs)
    assert find_components(g).max_level <= scc_partition(g).max_level


def test_plain_scc_matches_kosaraju(rng):
    for _ in range(100):
        g = random_digraph(rng, int(rng.integers(1, 30)), 0.1)
        p = scc_partition(g)
        adj = [[] for _ in range(g.vertex_count)]
        for u, v in edge_list(g):
            if u != v:
                adj[u].append(v)
        ko = np.array(kosaraju(g.vertex_count, adj))
        # same equivalence classes
        pairs_p = {(a, b) for a in range(g.vertex_count) for b in range(g.vertex_count) if p.comp_of[a] == p.comp_of[b]}
        pairs_k = {(a, b) for a in range(g.vertex_count) for b in range(g.vertex_count) if ko[a] == ko[b]}
        assert pairs_p == pairs_k


def test_dfs_counters(rng):
    for _ in range(50):
        g = random_digraph(rng, int(rng.integers(1, 40)), 0.1, loops=True)
        _, counters = find_components(g, return_counters=True)
        assert counters.explore_edge_visits == g.edge_count - int(g.loop_mask.sum())
        assert counters.merge_edge_visits <= g.edge_count
        assert counters.finish_calls == g.vertex_count


def test_deep_chain_does_not_recurse():
    n = 200_000
    g = from_pairs(n, [(i, i + 1) for i in range(n - 1)])
    p = find_components(g)
    assert p.component_count == 1
    big = cycle(n)
    assert find_components(big).size.tolist() == [n]


def test_validator_flags_split_scc(example8_graph):
    good = find_components(example8_graph)
    comp_of = good.comp_of.copy()
    bd = comp_of[1]
    comp_of[3] = good.component_count
    bad = Partition(comp_of, np.append(good.kind, ComponentKind.SCC), np.append(good.level, 1),
                    np.bincount(comp_of))
    problems = validate_partition(example8_graph, bad)
    assert any("split" in s for s in problems)
    assert bd != comp_of[3]


def test_validator_flags_wrong_level(example8_graph):
    good = find_components(example8_graph)
    level = good.level.copy()
    level[good.comp_of[0]] += 1
    bad = Partition(good.comp_of, good.kind, level, good.size)
    assert any("longest path" in s for s in validate_partition(example8_graph, bad))


def test_validator_flags_unmerged_head():
    g = from_pairs(2, [(0, 1)])
    bad = Partition(np.array([0, 1]), np.array([2, 2], np.int8), np.array([1, 0]), np.array([1, 1]))
    assert any("can still merge" in s for s in validate_partition(g, bad))


def test_union_find_path_compression():
    parent = np.array([1, 2, 3, 4, 5, 5], dtype=np.int64)  # a long chain
    assert _kernels.uf_find(parent, 0) == 5
    assert parent.tolist() == [5, 5, 5, 5, 5, 5]


def test_union_by_depth_keeps_shallow_tree_below():
    parent = np.arange(4, dtype=np.int64)
    depth = np.ones(4, dtype=np.int64)
    _kernels.uf_union(parent, depth, 0, 1)
    root = _kernels.uf_find(parent, 0)
    _kernels.uf_union(parent, depth, 2, root)
    assert _kernels.uf_find(parent, 2) == root
    assert depth[root] == 2

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphs import EXAMPLE8_NAMES, edge_list, example8, from_pairs, on_nonloop_cycle, random_digraph
from levelrank import Graph, GraphFormatError, VertexGroup, classify_vertices, edge_weight, parse_edge_list, serialize
from levelrank.graph import read_edge_list
from levelrank.partition import scc_partition

SNAP_HEADER = """# Directed graph (each unordered pair of nodes is saved once): web-Google.txt
# Webgraph from the Google programming contest, 2002
# Nodes: 5 Edges: 6
# FromNodeId\tToNodeId
"""


def test_parse_snap_style_with_comments():
    g = parse_edge_list(SNAP_HEADER + "0\t1\n0\t4\n1\t2\n2\t0\n4\t4\n3\t1\n")
    assert g.vertex_count == 5
    assert g.edge_count == 6
    assert edge_list(g) == [(0, 1), (0, 4), (1, 2), (2, 0), (3, 1), (4, 4)]


def test_parse_duplicate_edges_collapse():
    g = parse_edge_list("0\t1\n0\t1\n1\t0\n")
    assert g.edge_count == 2


def test_parse_crlf_and_spaces():
    g = parse_edge_list("0 1\r\n1   2\r\n")
    assert edge_list(g) == [(0, 1), (1, 2)]


@pytest.mark.parametrize(
    "text, lineno",
    [("0\t1\n1\n", 2), ("# c\n0\tx\n", 2), ("0\t1\t2\n", 1), ("0\t-1\n", 1)],
)
def test_parse_malformed_reports_line(text, lineno):
    with pytest.raises(GraphFormatError, match=f"line {lineno}"):
        parse_edge_list(text)


def test_parse_empty_is_error():
    with pytest.raises(GraphFormatError):
        parse_edge_list("# nothing here\n\n")


def test_sparse_ids_compact_and_keep_labels():
    g = parse_edge_list("10\t500\n500\t7\n", dense_ids=False)
    assert g.vertex_count == 3
    assert g.labels.tolist() == [7, 10, 500]
    assert serialize(g) == "10\t500\n500\t7\n"


def test_dense_ids_include_gaps():
    g = parse_edge_list("0\t5\n")
    assert g.vertex_count == 6
    assert g.out_degree.tolist() == [1, 0, 0, 0, 0, 0]


def test_serialize_round_trip_file(tmp_path, example8_graph):
    path = tmp_path / "example8.txt"
    with open(path, "w", newline="") as fh:
        serialize(example8_graph, fh)
    raw = path.read_bytes()
    assert b"\r" not in raw
    back = read_edge_list(path)
    assert edge_list(back) == edge_list(example8_graph)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=80))
def test_serialize_parse_is_identity(pairs):
    n = 1 + max(max(p) for p in pairs)
    g = from_pairs(n, pairs)
    back = parse_edge_list(serialize(g))
    assert edge_list(back) == sorted(set(pairs))


def test_edge_weight_example8(example8_graph):
    idx = EXAMPLE8_NAMES.index
    assert edge_weight(example8_graph, idx("B"), idx("F")) == pytest.approx(1 / 3)
    assert edge_weight(example8_graph, idx("A"), idx("C")) == 0.5
    assert edge_weight(example8_graph, idx("E"), idx("F")) == 1.0
    assert edge_weight(example8_graph, idx("F"), idx("E")) is None


def test_edge_weight_loop_policy():
    g = from_pairs(2, [(0, 0), (0, 1)])
    assert edge_weight(g, 0, 0) is None
    assert edge_weight(g, 0, 1) == 1.0
    kept = g.with_loop_policy(True)
    assert edge_weight(kept, 0, 0) == 0.5
    assert edge_weight(kept, 0, 1) == 0.5


def test_out_degree_loop_policy():
    g = from_pairs(3, [(0, 0), (0, 1), (1, 2), (2, 2)])
    assert g.out_degree.tolist() == [1, 1, 0]
    assert g.with_loop_policy(True).out_degree.tolist() == [2, 1, 1]
    offsets, targets = g.rank_csr
    assert offsets.tolist() == [0, 1, 2, 2]
    assert targets.tolist() == [1, 2]


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [0], [2])


def test_in_adjacency_matches_edges(rng):
    g = random_digraph(rng, 30, 0.2)
    offsets, sources = g.in_adjacency
    got = sorted((int(sources[i]), v) for v in range(30) for i in range(offsets[v], offsets[v + 1]))
    assert got == edge_list(g)


def test_classify_example8(example8_graph):
    p = scc_partition(example8_graph)
    groups = classify_vertices(example8_graph, p.size[p.comp_of] > 1)
    named = dict(zip(EXAMPLE8_NAMES, groups.tolist()))
    assert named["A"] == VertexGroup.G3
    assert named["F"] == VertexGroup.G2
    assert named["E"] == VertexGroup.G4
    assert named["C"] == VertexGroup.G4
    for v in "BDGH":
        assert named[v] == VertexGroup.G5


def test_classify_isolated_and_two_cycle():
    g = from_pairs(4, [(1, 2), (2, 1), (3, 3)])
    p = scc_partition(g)
    groups = classify_vertices(g, p.size[p.comp_of] > 1)
    assert groups.tolist() == [VertexGroup.G1, VertexGroup.G5, VertexGroup.G5, VertexGroup.G1]


def test_classify_against_brute_force_cycles(rng):
    for _ in range(100):
        n = int(rng.integers(1, 14))
        g = random_digraph(rng, n, 0.2, loops=True)
        p = scc_partition(g)
        groups = classify_vertices(g, p.size[p.comp_of] > 1)
        brute = on_nonloop_cycle(n, edge_list(g))
        assert np.array_equal(groups == VertexGroup.G5, brute)


def test_graph_from_stream():
    g = parse_edge_list(io.StringIO("1\t0\n"))
    assert edge_list(g) == [(1, 0)]


def test_example8_degrees():
    g = example8()
    assert g.out_degree.tolist() == [2, 3, 2, 1, 1, 0, 1, 1]

import io
import pickle

import numpy as np
import pytest

from app.errors import ArgumentError, ParseError
from app.graph import (Graph, IdMap, VertexSet, bfs_neighborhood,
                       connected_components, induced_subgraph, is_connected,
                       parse_community_list, parse_edge_list,
                       parse_vertex_list, read_community_list, read_edge_list,
                       read_vertex_list, write_edge_list, write_vertex_list)
from app.generators import gnp
from tests.conftest import complete_graph, cycle_graph, path_graph, star_graph


def parse(text):
    return parse_edge_list(io.StringIO(text))


def test_parse_path():
    """Test parsing a path of three vertices."""
    g, idmap = parse("0 1\n1 2")
    assert g.n == 3
    assert g.m == 2
    assert g.neighbors(1).tolist() == [0, 2]
    assert idmap.backward == (0, 1, 2)


def test_parse_drops_self_loop_and_remaps():
    g, idmap = parse("5 5\n5 6")
    assert (g.n, g.m) == (2, 1)
    assert idmap.to_internal(5) == 0
    assert idmap.to_external(1) == 6


def test_parse_deduplicates_reverse_edge():
    g, _ = parse("# c\n1 2\n2 1")
    assert (g.n, g.m) == (2, 1)


def test_parse_skips_blank_lines():
    g, _ = parse("\n1 2\n\n   \n2 3\n")
    assert g.m == 2


@pytest.mark.parametrize("text, line_no", [
    ("0 1\n1 x\n", 2),
    ("0 1 2\n", 1),
    ("# header\n0\n", 2),
])
def test_parse_error_reports_line(text, line_no):
    """Test malformed lines raise a ParseError carrying the line number."""
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line_no == line_no
    assert f"line {line_no}" in str(info.value)


def test_adjacency_is_sorted_and_symmetric():
    g = gnp(40, 0.2, seed=3)
    for v in range(g.n):
        nbrs = g.neighbors(v).tolist()
        assert nbrs == sorted(set(nbrs))
        assert v not in nbrs
        for u in nbrs:
            assert g.has_edge(u, v)


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ArgumentError):
        Graph.from_edges(2, [(0, 2)])


def test_edge_array_orders_endpoints():
    g = Graph.from_edges(4, [(3, 0), (2, 1), (1, 0)])
    assert g.edge_array().tolist() == [[0, 1], [0, 3], [1, 2]]


def test_adjacency_matrix_matches_degrees():
    g = gnp(25, 0.3, seed=11)
    matrix = g.adjacency_matrix()
    assert (matrix != matrix.T).nnz == 0
    assert np.array_equal(np.asarray(matrix.sum(axis=1)).ravel(),
                          g.degrees())


def test_serialization_round_trip():
    g, idmap = parse("10 20\n20 30\n30 10\n30 40\n")
    out = io.StringIO()
    write_edge_list(g, out, idmap)
    again, again_ids = parse(out.getvalue())
    assert again == g
    assert again_ids == idmap
    assert again.fingerprint() == g.fingerprint()


def test_read_edge_list_from_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# a triangle\n1 2\n2 3\n3 1\n", encoding="utf-8")
    g, _ = read_edge_list(str(path))
    assert g == complete_graph(3)


def test_invalid_utf8_reports_line(tmp_path):
    path = tmp_path / "g.txt"
    path.write_bytes(b"0 1\n1 \xff2\n")
    with pytest.raises(ParseError) as info:
        read_edge_list(str(path))
    assert info.value.line_no == 2


def test_invalid_utf8_in_vertex_and_community_files(tmp_path):
    path = tmp_path / "v.txt"
    path.write_bytes(b"# ids\n3\n\xc3\n")
    with pytest.raises(ParseError) as info:
        read_vertex_list(str(path))
    assert info.value.line_no == 3
    with pytest.raises(ParseError):
        read_community_list(str(path))
    path.write_bytes("# café\n1 2\r\n3\n".encode("utf-8"))
    assert read_community_list(str(path)) == [[1, 2], [3]]


def test_vertex_and_community_lists():
    assert parse_vertex_list(io.StringIO("# ids\n4\n2\n\n9\n")) == [4, 2, 9]
    with pytest.raises(ParseError):
        parse_vertex_list(io.StringIO("1 2\n"))
    assert parse_community_list(io.StringIO("1 2 3\n# c\n4 5\n")) == \
        [[1, 2, 3], [4, 5]]

    out = io.StringIO()
    write_vertex_list(VertexSet.of([0, 2]), out,
                      IdMap.from_external([7, 8, 9]))
    assert out.getvalue() == "7\n9\n"


def test_pickle_preserves_graph():
    g = gnp(20, 0.3, seed=5)
    assert pickle.loads(pickle.dumps(g)) == g


def test_fingerprint_distinguishes_graphs():
    assert path_graph(4).fingerprint() != star_graph(3).fingerprint()
    assert path_graph(4).fingerprint() == path_graph(4).fingerprint()


def test_vertex_set_is_sorted_and_unique():
    s = VertexSet((3, 1, 3, 2))
    assert s.members == (1, 2, 3)
    assert 2 in s and 5 not in s
    assert VertexSet.of([1, 2]).issubset(s)


def test_idmap_unknown_id():
    with pytest.raises(ArgumentError):
        IdMap.identity(3).to_internal(7)


def test_bfs_on_path():
    g = path_graph(5)
    assert bfs_neighborhood(g, 2, 1).members == (1, 2, 3)
    assert bfs_neighborhood(g, 0, 2).members == (0, 1, 2)


def test_bfs_leaf_of_star_reaches_all_leaves():
    assert bfs_neighborhood(star_graph(3), 1, 2).members == (0, 1, 2, 3)


def test_bfs_is_monotone_in_depth():
    g = gnp(30, 0.08, seed=1)
    for v in range(g.n):
        previous = bfs_neighborhood(g, v, 1)
        assert v in previous
        for t in (2, 3):
            current = bfs_neighborhood(g, v, t)
            assert previous.issubset(current)
            previous = current


def test_bfs_full_depth_is_component():
    g = gnp(30, 0.05, seed=2)
    for component in connected_components(g):
        v = component.members[0]
        assert bfs_neighborhood(g, v, g.n) == component


@pytest.mark.parametrize("v, t", [(-1, 1), (5, 1), (0, 0)])
def test_bfs_argument_errors(v, t):
    with pytest.raises(ArgumentError):
        bfs_neighborhood(path_graph(5), v, t)


def test_induced_subgraph_examples():
    sub, local = induced_subgraph(complete_graph(4), VertexSet.of([0, 1, 2]))
    assert sub == complete_graph(3)
    assert local.backward == (0, 1, 2)

    sub, _ = induced_subgraph(cycle_graph(5), VertexSet.of([0, 1, 2, 3]))
    assert sub == path_graph(4)

    sub, _ = induced_subgraph(cycle_graph(5), VertexSet.of([0, 2]))
    assert (sub.n, sub.m) == (2, 0)


def test_induced_subgraph_relabels_in_ascending_order():
    g = Graph.from_edges(6, [(1, 4), (4, 5), (0, 1)])
    sub, local = induced_subgraph(g, VertexSet.of([5, 1, 4]))
    assert local.backward == (1, 4, 5)
    assert sorted(sub.edges()) == [(0, 1), (1, 2)]


def test_induced_subgraph_on_all_vertices_is_identity():
    g = gnp(30, 0.2, seed=9)
    sub, _ = induced_subgraph(g, VertexSet.of(range(g.n)))
    assert sub == g


def test_induced_subgraph_out_of_range():
    with pytest.raises(ArgumentError):
        induced_subgraph(path_graph(3), VertexSet.of([0, 3]))


def test_components_ordering():
    two = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2),
                               (3, 4), (4, 5), (3, 5)])
    assert [c.members for c in connected_components(two)] == \
        [(0, 1, 2), (3, 4, 5)]

    uneven = Graph.from_edges(5, [(3, 4), (0, 2), (2, 1)])
    assert [len(c) for c in connected_components(uneven)] == [3, 2]

    assert [c.members for c in connected_components(Graph.empty(3))] == \
        [(0,), (1,), (2,)]


def test_is_connected():
    assert is_connected(path_graph(4))
    assert not is_connected(Graph.from_edges(4, [(0, 1), (2, 3)]))
    assert not is_connected(Graph.empty(0))

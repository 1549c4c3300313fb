import io

import pytest
from hypothesis import given, strategies as st

from commvuln import Graph, parse_edge_list, serialize_edge_list
from commvuln.graph import ParseError, SelfLoopError, degree, read_edge_list


def test_duplicate_undirected_edge_collapses():
    g = parse_edge_list("1 2\n2 1\n")
    assert g.num_nodes == 2
    assert g.num_edges == 1


def test_canonical_size(canonical):
    assert (canonical.num_nodes, canonical.num_edges) == (9, 14)


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError, match="'1'") as info:
        parse_edge_list("1 1\n")
    assert info.value.lineno == 1


def test_malformed_line_reports_line_number():
    with pytest.raises(ParseError) as info:
        parse_edge_list("# header\n1 2\n\n3 4 5\n")
    assert info.value.lineno == 4
    assert "line 4" in str(info.value)


def test_single_token_line():
    with pytest.raises(ParseError, match="line 1"):
        parse_edge_list("7\n")


def test_empty_input_is_an_error():
    with pytest.raises(ParseError):
        parse_edge_list("# nothing here\n\n")


def test_comments_and_blank_lines_skipped():
    g = parse_edge_list("# c\n\n a b \n#x y\nb c\n")
    assert g.nodes == ("a", "b", "c")
    assert g.num_edges == 2


def test_accepts_stream(tmp_path):
    assert parse_edge_list(io.StringIO("x y\n")).num_edges == 1
    path = tmp_path / "g.txt"
    path.write_text("x y\ny z\n")
    assert read_edge_list(path).num_edges == 2


def test_node_order_is_first_appearance():
    g = parse_edge_list("10 2\n2 3\n1 10\n")
    assert g.nodes == ("10", "2", "3", "1")


def test_labels_are_opaque_strings():
    g = parse_edge_list("01 1\n")
    assert g.nodes == ("01", "1")


@pytest.mark.parametrize("node, expected", [("6", 5), ("4", 2), ("1", 2), ("9", 4)])
def test_canonical_degrees(canonical, node, expected):
    assert degree(canonical, node) == expected


def test_degree_sum_of_canonical_community(canonical):
    # the merged community {6,7,8,9} carries total degree 16
    assert sum(canonical.degree(v) for v in "6789") == 16


def test_isolated_node_degree():
    g = Graph.from_edges([], nodes=["solo"])
    assert g.degree("solo") == 0


def test_unknown_node_lookup(canonical):
    with pytest.raises(KeyError):
        canonical.degree("42")


edge_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12)).filter(lambda e: e[0] != e[1]),
    min_size=1,
    max_size=40,
)


@given(edge_lists)
def test_handshake(edges):
    g = Graph.from_edges(edges)
    assert sum(g.degrees().values()) == 2 * g.num_edges


@given(edge_lists)
def test_round_trip(edges):
    g = Graph.from_edges(edges)
    again = parse_edge_list(serialize_edge_list(g))
    assert {frozenset(e) for e in again.edges} == {frozenset(e) for e in g.edges}
    assert again.nodes == g.nodes


@given(edge_lists)
def test_adjacency_symmetric(edges):
    g = Graph.from_edges(edges)
    for u in g.nodes:
        for v in g.nodes:
            assert g.adjacency(u, v) == g.adjacency(v, u)
        assert g.adjacency(u, u) == 0


def test_graph_is_immutable(canonical):
    with pytest.raises(AttributeError):
        canonical.nodes = ()

import random

import pytest
from hypothesis import given, settings, strategies as st

from commvuln import Graph, Partition, detect_communities, merge_delta_q, modularity, parse_edge_list
from commvuln.community import CommunityError
from conftest import planted
from oracles import best_partitions, matrix_modularity

TRACE_Q = [-0.1224, -0.0612, -0.0051, 0.0995, 0.1403, 0.2117, 0.2857, 0.2653]
TRACE_DQ = [None, 0.0612, 0.0561, 0.1046, 0.0408, 0.0714, 0.0740, -0.0204]
TRACE_MERGES = [
    (("1",), ("2",)),
    (("3",), ("4",)),
    (("3", "4"), ("5",)),
    (("7",), ("8",)),
    (("7", "8"), ("9",)),
    (("6",), ("7", "8", "9")),
    (("1", "2"), ("6", "7", "8", "9")),
]


def test_modularity_final_partition(canonical, canonical_partition):
    assert modularity(canonical, canonical_partition) == pytest.approx(0.2857, abs=5e-5)


def test_modularity_singletons(canonical):
    assert modularity(canonical, Partition.singletons(canonical)) == pytest.approx(-0.1224, abs=5e-5)


def test_modularity_single_community_is_zero(canonical):
    whole = Partition.from_groups(canonical, [canonical.nodes])
    assert modularity(canonical, whole) == 0.0


def test_modularity_matches_matrix_oracle(canonical, canonical_partition):
    expected = matrix_modularity(canonical.nodes, canonical.edges, canonical_partition.communities)
    assert modularity(canonical, canonical_partition) == pytest.approx(expected, abs=1e-12)


def test_edgeless_graph():
    g = Graph.from_edges([], nodes=["a", "b"])
    with pytest.raises(CommunityError):
        modularity(g, Partition.singletons(g))
    with pytest.raises(CommunityError):
        detect_communities(g)


def test_delta_q_at_t6(canonical):
    p = Partition.from_groups(canonical, [["1", "2"], ["3", "4", "5"], ["6"], ["7", "8", "9"]])
    assert merge_delta_q(canonical, p, 2, 3) == pytest.approx(0.0740, abs=5e-5)


def test_delta_q_rejected_merge(canonical, canonical_partition):
    assert merge_delta_q(canonical, canonical_partition, 0, 2) == pytest.approx(-0.0204, abs=5e-5)


def test_delta_q_without_spanning_edges(canonical, canonical_partition):
    # {1,2} and {3,4,5}: no edges between, D = 4 and 8, |E| = 14
    expected = -2 * 4 * 8 / (2 * 14) ** 2
    assert merge_delta_q(canonical, canonical_partition, 0, 1) == pytest.approx(expected, abs=1e-15)
    assert expected < 0


def test_delta_q_same_community(canonical, canonical_partition):
    with pytest.raises(CommunityError):
        merge_delta_q(canonical, canonical_partition, 1, 1)


def test_unknown_community(canonical, canonical_partition):
    with pytest.raises(KeyError):
        merge_delta_q(canonical, canonical_partition, 0, 7)


def test_trace_matches_reference_values(canonical):
    trace = detect_communities(canonical)
    assert [s.t for s in trace.steps] == list(range(8))
    for step, q, dq in zip(trace.steps, TRACE_Q, TRACE_DQ):
        assert step.q == pytest.approx(q, abs=5e-5)
        if dq is None:
            assert step.delta_q is None
        else:
            assert step.delta_q == pytest.approx(dq, abs=5e-5)
    assert [s.merged_nodes for s in trace.steps[1:]] == TRACE_MERGES
    assert [s.applied for s in trace.steps] == [True] * 7 + [False]
    assert trace.final.communities == (("1", "2"), ("3", "4", "5"), ("6", "7", "8", "9"))
    assert trace.final_q == pytest.approx(0.2857, abs=5e-5)
    # the modularity of a good community structure
    assert 0.2 <= trace.final_q <= 0.7


def test_trace_rejected_row_shows_arithmetic_structure(canonical):
    last = detect_communities(canonical).steps[-1]
    assert last.partition.format() == "{1, 2, 6, 7, 8, 9}, {3, 4, 5}"


def test_trace_delta_consistency(canonical):
    steps = detect_communities(canonical).steps
    for prev, cur in zip(steps, steps[1:]):
        assert cur.delta_q == pytest.approx(cur.q - prev.q, abs=1e-12)


def test_triangle_matches_exhaustive_search():
    g = parse_edge_list("a b\nb c\na c\n")
    trace = detect_communities(g)
    top, best = best_partitions(list(g.nodes), list(g.edges))
    assert trace.final_q == pytest.approx(top, abs=1e-12)
    assert sorted(map(sorted, trace.final.communities)) in [sorted(map(sorted, p)) for p in best]


def test_two_triangles_joined_by_bridge():
    g = parse_edge_list("1 2\n2 3\n1 3\n4 5\n5 6\n4 6\n3 4\n")
    trace = detect_communities(g)
    assert trace.final.communities == (("1", "2", "3"), ("4", "5", "6"))
    top, best = best_partitions(list(g.nodes), list(g.edges))
    assert trace.final_q == pytest.approx(top, abs=1e-12)
    assert len(best) == 1


def test_disconnected_components_agglomerate_separately():
    g = parse_edge_list("a b\nb c\na c\nx y\ny z\nx z\n")
    trace = detect_communities(g)
    assert trace.final.communities == (("a", "b", "c"), ("x", "y", "z"))


def test_tie_break_prefers_smallest_pair():
    # four disjoint edges: every first merge has the same gain
    g = parse_edge_list("1 2\n3 4\n5 6\n7 8\n")
    trace = detect_communities(g)
    assert trace.steps[1].merged == (0, 1)
    assert trace.final.communities == (("1", "2"), ("3", "4"), ("5", "6"), ("7", "8"))


def test_partition_validation(canonical):
    with pytest.raises(CommunityError):
        Partition.from_groups(canonical, [["1", "2"]])
    with pytest.raises(CommunityError):
        Partition.from_groups(canonical, [["1", "2", "3", "4", "5"], ["5", "6", "7", "8", "9"]])
    with pytest.raises(CommunityError):
        Partition.from_groups(canonical, [["1", "2", "3", "4", "5", "6", "7", "8", "9"], []])


def test_from_labels(canonical, canonical_partition):
    labels = {v: k for k, grp in enumerate(canonical_partition.communities) for v in grp}
    assert Partition.from_labels(canonical, labels) == canonical_partition


def _random_partition(g, rng):
    k = rng.randint(1, g.num_nodes)
    return Partition.from_labels(g, {v: rng.randrange(k) for v in g.nodes})


@settings(max_examples=60, deadline=None)
@given(planted(), st.randoms(use_true_random=False))
def test_delta_q_equals_recomputed_difference(gp, rng):
    g, _ = gp
    p = _random_partition(g, rng)
    if p.count < 2:
        return
    a, b = rng.sample(range(p.count), 2)
    direct = modularity(g, p.merged(g, a, b)) - modularity(g, p)
    assert merge_delta_q(g, p, a, b) == pytest.approx(direct, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(planted())
def test_singleton_modularity_law(gp):
    g, _ = gp
    m = g.num_edges
    expected = -sum(d * d for d in g.degrees().values()) / (2 * m) ** 2
    assert modularity(g, Partition.singletons(g)) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(planted())
def test_modularity_matches_matrix_form(gp):
    g, p = gp
    expected = matrix_modularity(g.nodes, g.edges, p.communities)
    assert modularity(g, p) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(planted())
def test_greedy_steps_take_the_best_merge(gp):
    g, _ = gp
    trace = detect_communities(g)
    for prev, step in zip(trace.steps, trace.steps[1:]):
        p = prev.partition
        gains = [
            merge_delta_q(g, p, a, b) for a in range(p.count) for b in range(a + 1, p.count)
        ]
        assert step.delta_q == pytest.approx(max(gains), abs=1e-12)


def test_larger_random_graph_runs_quickly():
    g, _ = __import__("conftest").planted_graph(random.Random(7), communities=20, max_size=15)
    trace = detect_communities(g)
    assert trace.final_q > 0.3

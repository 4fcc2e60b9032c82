import math

import numpy as np
import pytest

from app.errors import ArgumentError
from app.generators import gnp, make_rng
from app.graph import Graph, VertexSet, induced_subgraph, is_connected
from app.graphlets import graphlet_vector
from app.kdtree import KdIndex, build_index
from app.labeling import LabelParams, LabelSet, label_all
from app.matcher import (MatchParams, MatchState, complete_match, grow_match,
                         jaccard, lambda_weight, seed_match, select_candidates,
                         similarity)
from tests.conftest import path_graph


def kite_with_tail():
    """Diamond 0-1-2-3 with the tail 3-4-5."""
    return Graph.from_edges(6, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3),
                                (3, 4), (4, 5)])


def angle_labels(g):
    """Distinct unit labels (cos, sin) in the first quadrant."""
    angles = np.arange(g.n) * (math.pi / 2) / max(1, g.n)
    rows = np.column_stack([np.cos(angles), np.sin(angles)])
    return LabelSet(LabelParams(t=1, l=3), rows, g.fingerprint())


def unit_labels(rows, g):
    return LabelSet(LabelParams(t=1, l=3), np.asarray(rows, dtype=float),
                    g.fingerprint())


def test_params_validation():
    assert MatchParams() == MatchParams(k=10, alpha=0.3, h1=0.4, h2=0.95)
    for bad in ({"k": 0}, {"alpha": 0.0}, {"alpha": 1.0}, {"h1": 1.5},
                {"h2": -0.1}):
        with pytest.raises(ArgumentError):
            MatchParams(**bad)


def test_similarity_examples():
    f = np.array([1.0, 0.0])
    assert similarity(f, f) == 1.0
    assert similarity(f, np.array([0.0, 1.0])) == 0.0
    assert similarity(f, np.array([math.sqrt(.5), math.sqrt(.5)])) == \
        pytest.approx(0.7071, abs=1e-4)
    with pytest.raises(ArgumentError):
        similarity(f, np.zeros(3))


def test_similarity_accepts_graphlet_vectors(k4, p4):
    assert similarity(graphlet_vector(k4, 4), graphlet_vector(k4, 4)) == 1.0
    assert similarity(graphlet_vector(k4, 4), graphlet_vector(p4, 4)) == 0.0


def test_jaccard():
    assert jaccard({1, 2}, {1, 2}) == 1.0
    assert jaccard({1}, {2}) == 0.0
    assert jaccard({1, 2}, {1, 2, 3}) == pytest.approx(2 / 3)
    assert jaccard(set(), set()) == 0.0


def test_select_candidates_self_retrieval():
    g = gnp(30, 0.15, seed=21)
    labels = label_all(g, LabelParams())
    index = build_index(labels)
    _, rv = select_candidates(index, labels, 1)
    for v, (w,) in rv.items():
        assert np.array_equal(labels.labels[v], labels.labels[w])


def test_select_candidates_capped_by_target():
    target = gnp(5, 0.6, seed=2)
    index = build_index(label_all(target, LabelParams(t=1, l=3)))
    r, rv = select_candidates(index,
                              label_all(path_graph(3), LabelParams(t=1, l=3)),
                              10)
    assert len(r) <= 5
    assert all(len(ids) == 5 for ids in rv.values())


def test_select_candidates_disjoint_union():
    points = np.repeat(np.array([[1.0, 0.0], [0.0, 1.0]]), 3, axis=0)
    index = KdIndex(points)
    q = path_graph(2)
    query = unit_labels([[1.0, 0.0], [0.0, 1.0]], q)
    r, rv = select_candidates(index, query, 3)
    assert rv == {0: [0, 1, 2], 1: [3, 4, 5]}
    assert len(r) == 6


def test_select_candidates_dimension_mismatch():
    index = KdIndex(np.eye(6))
    with pytest.raises(ArgumentError):
        select_candidates(index, angle_labels(path_graph(3)), 1)


def test_lambda_reduces_to_similarity():
    """Test lambda equals s(v, w) whenever no other query vertex competes."""
    rng = make_rng(5)
    for trial in range(25):
        g = gnp(20, 0.2, seed=trial)
        rows = np.abs(rng.normal(size=(g.n, 2)))
        target = unit_labels(rows / np.linalg.norm(rows, axis=1,
                                                   keepdims=True), g)
        q = Graph.empty(1)
        query = unit_labels([rng.random(2)], q)
        candidates = sorted(rng.choice(g.n, size=5, replace=False).tolist())
        rv = {0: candidates}
        for w in candidates:
            expected = float(query.labels[0] @ target.labels[w])
            got = lambda_weight(0, w, rv, g, query, target, 0.3)
            assert got == pytest.approx(expected, abs=1e-12)


def test_lambda_with_one_competitor():
    g = Graph.from_edges(2, [(0, 1)])
    target = unit_labels([[1.0, 0.0], [0.0, 1.0]], g)
    q = Graph.from_edges(2, [(0, 1)])
    query = unit_labels([[1.0, 0.0], [0.0, 1.0]], q)
    rv = {0: [0], 1: [1]}
    value = lambda_weight(0, 0, rv, g, query, target, 0.3)
    assert value == pytest.approx(2 ** (1 / 0.3) / 2)
    assert value == pytest.approx(5.0397, abs=1e-4)


def test_lambda_zero_similarity():
    g = Graph.empty(1)
    assert lambda_weight(0, 0, {0: [0]}, g,
                         unit_labels([[1.0, 0.0]], g),
                         unit_labels([[0.0, 1.0]], g), 0.3) == 0.0


def test_lambda_requires_selected_target():
    g = path_graph(2)
    labels = angle_labels(g)
    with pytest.raises(ArgumentError):
        lambda_weight(0, 1, {0: [0]}, g, labels, labels, 0.3)


def test_seed_match_on_identical_graphs():
    g = kite_with_tail()
    labels = angle_labels(g)
    index = build_index(labels)
    params = MatchParams(k=1, h1=0.0)
    r, rv = select_candidates(index, labels, 1)
    seed = seed_match(g, g, r, rv, labels, labels, params)
    assert seed.pairs == tuple((v, v) for v in range(g.n))
    assert seed.s_g.members == tuple(range(g.n))
    assert seed.s_q == seed.s_g
    assert seed.matching_size == g.n


def test_seed_match_keeps_largest_component():
    # matched targets {0, 1, 2} and {4, 5} are not connected in g
    g = Graph.from_edges(6, [(0, 1), (1, 2), (4, 5)])
    labels = angle_labels(g)
    r, rv = select_candidates(build_index(labels), labels, 1)
    seed = seed_match(g, g, r, rv, labels, labels, MatchParams(k=1))
    assert seed.s_g.members == (0, 1, 2)
    assert seed.pairs == ((0, 0), (1, 1), (2, 2))
    assert seed.matching_size == 6


def test_seed_match_empty():
    g = path_graph(3)
    labels = angle_labels(g)
    seed = seed_match(Graph.empty(0), g, VertexSet(), {}, labels, labels,
                      MatchParams())
    assert seed.is_empty
    assert seed.matching_size == 0


def test_heap_replacement():
    state = MatchState()
    assert state.offer(0, 5, 0.5, h1=0.4)
    assert state.live_entry(0) == (5, 0.5)
    assert state.offer(0, 7, 0.9, h1=0.4)
    assert state.live_entry(0) == (7, 0.9)
    assert not state.offer(0, 5, 0.6, h1=0.4)
    assert state.pop() == (0, 7, 0.9)
    assert state.pop() is None
    assert state.mapping == {0: 7}


def test_replaced_target_is_free_again():
    state = MatchState()
    state.offer(0, 5, 0.5, h1=0.0)
    state.offer(0, 7, 0.9, h1=0.0)
    assert state.offer(1, 5, 0.6, h1=0.0)
    assert state.pop() == (0, 7, 0.9)
    assert state.pop() == (1, 5, 0.6)


def test_offer_below_threshold():
    state = MatchState()
    assert not state.offer(0, 5, 0.3, h1=0.4)
    assert len(state) == 0


def test_offer_keeps_one_to_one():
    state = MatchState()
    state.offer(0, 5, 0.5, h1=0.0)
    with pytest.raises(ArgumentError):
        state.offer(1, 5, 0.9, h1=0.0)
    state.pop()
    with pytest.raises(ArgumentError):
        state.offer(0, 6, 0.9, h1=0.0)


def test_pop_order_breaks_ties_by_query_then_target():
    state = MatchState()
    state.offer(2, 20, 0.8, 0.0)
    state.offer(1, 30, 0.8, 0.0)
    state.offer(3, 10, 0.9, 0.0)
    assert [state.pop()[0] for _ in range(3)] == [3, 1, 2]


def test_grow_seeds_below_threshold():
    g = kite_with_tail()
    query = unit_labels(np.tile([1.0, 0.0], (g.n, 1)), g)
    target = unit_labels(np.tile([0.0, 1.0], (g.n, 1)), g)
    state = grow_match([(0, 0), (1, 1)], g, g, query, target, h1=0.4)
    assert state.mapping == {}


def test_grow_from_single_seed_reaches_identity():
    g = kite_with_tail()
    labels = angle_labels(g)
    state = grow_match([(0, 0)], g, g, labels, labels, h1=0.0)
    assert state.mapping == {v: v for v in range(g.n)}
    assert len(state) == 0


def test_grow_stays_connected():
    g = gnp(40, 0.1, seed=17)
    q = path_graph(6)
    qlabels = label_all(q, LabelParams(t=1, l=3))
    tlabels = label_all(g, LabelParams(t=1, l=3))
    state = grow_match([(0, 0)], q, g, qlabels, tlabels, h1=0.0)
    targets = VertexSet.of(state.mapping.values())
    assert len(targets) == len(state.mapping)
    sub, _ = induced_subgraph(g, targets)
    assert is_connected(sub)


def test_complete_match_fills_boundary(paw, triangle):
    state = MatchState()
    state.offer(0, 0, 1.0, 0.0)
    state.pop()
    state.offer(1, 1, 1.0, 0.0)
    state.pop()
    result = complete_match(state, triangle, paw, h2=0.95, graphlet_size=3)
    assert result.mapping == {0: 0, 1: 1, 2: 2}
    assert result.target_set == (0, 1, 2)
    assert result.score == 1.0
    assert result.grown == 2
    assert result.completed == 1
    assert result.unmatched_queries() == []


def test_complete_match_pairs_equal_neighborhoods(paw, triangle):
    state = MatchState()
    state.offer(0, 0, 1.0, 0.0)
    state.pop()
    result = complete_match(state, triangle, paw, h2=0.95, graphlet_size=3)
    assert result.matched == 3
    assert result.target_set == (0, 1, 2)
    assert result.score == 1.0


def test_complete_match_threshold_leaves_query_unmatched():
    g = path_graph(3)
    state = MatchState()
    state.offer(0, 0, 1.0, 0.0)
    state.pop()
    result = complete_match(state, g, g, h2=0.95, graphlet_size=3)
    assert result.mapping == {0: 0, 1: 1}
    assert result.unmatched_queries() == [2]
    assert result.score == 0.0


def test_complete_match_empty_state(triangle):
    result = complete_match(MatchState(), triangle, triangle, h2=0.95,
                            graphlet_size=3)
    assert result.mapping == {}
    assert result.score == 0.0
    assert result.unmatched_queries() == [0, 1, 2]

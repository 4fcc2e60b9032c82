import logging

import pytest

from app.entity.experiment_report import ExperimentReport
from app.errors import (ArgumentError, DisconnectedQueryError,
                        ParamsMismatchError)
from app.generators import gnp
from app.graph import (Graph, VertexSet, induced_subgraph, is_connected,
                       parse_edge_list)
from app.graphlets import graphlet_vector
from app.labeling import LabelParams
from app.matcher import MatchParams
from app.pipeline import (DENSE_SIZE, TARGET_SIZE, PlantedQuery, RunConfig,
                          SearchIndex, SuiteSummary, _dense_target,
                          _planted_target, communities_to_queries,
                          mean_cross_score, run_benchmark,
                          run_experiment_suite, run_query, score_vertex_set)
from tests.conftest import complete_graph, cycle_graph, path_graph

SMALL = LabelParams(t=1, l=3)


@pytest.fixture
def k6_index():
    return SearchIndex.build(complete_graph(6), SMALL)


@pytest.fixture
def sparse_index():
    return SearchIndex.build(gnp(40, 0.15, seed=3), SMALL)


def test_run_config_validation():
    assert RunConfig().label == LabelParams()
    with pytest.raises(ArgumentError):
        RunConfig(workers=0)
    with pytest.raises(ArgumentError):
        RunConfig(seed=-1)
    with pytest.raises(ArgumentError):
        RunConfig(seed=2 ** 64)


def test_index_rejects_wrong_label_count():
    index = SearchIndex.build(path_graph(4), SMALL)
    with pytest.raises(ArgumentError):
        SearchIndex(path_graph(5), index.labels)


def test_run_query_params_mismatch(k6_index):
    with pytest.raises(ParamsMismatchError):
        run_query(k6_index, complete_graph(3), RunConfig(LabelParams()))


def test_run_query_disconnected(k6_index):
    q = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedQueryError):
        run_query(k6_index, q, RunConfig(SMALL))


def test_clique_query_in_larger_clique(k6_index, caplog):
    """Test a K4 query finds a K4 and k is clamped to the target size."""
    with caplog.at_level(logging.WARNING, logger="app.pipeline"):
        outcome = run_query(k6_index, complete_graph(4), RunConfig(SMALL),
                            planted=VertexSet.of(range(4)))
    assert "clamping" in caplog.text
    assert outcome.result.matched == 4
    assert outcome.result.score == pytest.approx(1.0)
    assert len(outcome.candidates) == 6
    report = outcome.report
    assert report.n_q == 4
    assert report.in_pruned
    assert 0.0 <= report.delta <= report.tau


def test_single_edge_query_scores_zero(k6_index):
    outcome = run_query(k6_index, path_graph(2), RunConfig(SMALL))
    assert outcome.result.score == 0.0
    assert outcome.result.matched <= 2


def test_query_result_is_one_to_one(sparse_index):
    cfg = RunConfig(SMALL, MatchParams(k=5, h1=0.0))
    result = run_query(sparse_index, cycle_graph(6), cfg).result
    targets = list(result.mapping.values())
    assert len(set(targets)) == len(targets)
    assert result.target_set == tuple(sorted(targets))
    assert 0.0 <= result.score <= 1.0


def test_score_vertex_set(k4):
    assert score_vertex_set(path_graph(4), k4, [0, 1, 2, 3], 3) == 0.0
    assert score_vertex_set(complete_graph(3), k4, [0, 2, 3], 3) == \
        pytest.approx(1.0)
    with pytest.raises(ArgumentError):
        score_vertex_set(path_graph(4), k4, [], 3)


def test_experiment_suite(sparse_index):
    queries = [PlantedQuery(path_graph(4)), PlantedQuery(cycle_graph(5))]
    cfg = RunConfig(SMALL, seed=11)
    reports, summary = run_experiment_suite(sparse_index, queries, cfg,
                                            first_index=3)

    assert [r.query_index for r in reports] == [3, 4]
    assert all(r.baseline_score is not None for r in reports)
    assert all(not r.in_pruned and not r.exact_match for r in reports)
    assert summary.count == 2
    assert summary.mean_score == pytest.approx(
        (reports[0].score + reports[1].score) / 2)
    assert summary.mean_cross == 1.0

    again, _ = run_experiment_suite(sparse_index, queries, cfg,
                                    first_index=3)
    assert [r.to_dict(timings=False) for r in again] == \
        [r.to_dict(timings=False) for r in reports]


def test_experiment_suite_density(sparse_index):
    reports, summary = run_experiment_suite(
        sparse_index, [PlantedQuery(cycle_graph(5))], RunConfig(SMALL),
        baseline=False, with_density=True)
    assert reports[0].baseline_score is None
    assert summary.mean_baseline is None
    if reports[0].matched >= 2:
        assert 0.0 <= reports[0].density <= 1.0


def test_mean_cross_score():
    vectors = [graphlet_vector(g, 3) for g in
               (path_graph(4), complete_graph(4), path_graph(5))]
    assert mean_cross_score(vectors) == pytest.approx(1 / 3)
    assert mean_cross_score(vectors[:1]) is None


def test_communities_to_queries():
    g, idmap = parse_edge_list(["10 11", "11 12", "12 13"])
    communities = [[10, 11, 12], [12, 99], [13], [10, 11, 13]]

    queries = communities_to_queries(g, communities, idmap)

    assert [q.planted.members for q in queries] == [(0, 1, 2), (0, 1)]
    assert queries[0].graph == path_graph(3)
    assert queries[1].graph == path_graph(2)


def test_suite_summary():
    reports = [ExperimentReport(score=0.5, baseline_score=0.25,
                                in_pruned=True, delta=1.0, tau=2.0),
               ExperimentReport(score=1.0, exact_match=True, density=0.8,
                                delta=3.0, tau=4.0)]
    summary = SuiteSummary.from_reports(reports)
    assert summary.mean_score == 0.75
    assert summary.mean_baseline == 0.25
    assert summary.mean_density == 0.8
    assert (summary.exact_matches, summary.in_pruned) == (1, 1)
    assert summary.mean_tau == 3.0

    data = summary.to_dict(timings=False)
    assert 'mean_delta' not in data and 'mean_tau' not in data
    assert SuiteSummary.from_reports([]).count == 0


def test_benchmark_arguments():
    with pytest.raises(ArgumentError):
        run_benchmark("unknown", 1, RunConfig(SMALL))
    with pytest.raises(ArgumentError):
        run_benchmark("planted", 0, RunConfig(SMALL))


def test_planted_benchmark_is_deterministic():
    cfg = RunConfig(SMALL, seed=42)
    (group,) = run_benchmark("planted", 2, cfg)
    assert group.name == "planted"
    assert [r.query_index for r in group.reports] == [0, 1]
    for report in group.reports:
        assert 0.0 <= report.score <= 1.0
        assert 25 <= report.n_q <= 40
        assert report.baseline_score is not None
        assert report.density is None

    (again,) = run_benchmark("planted", 2, cfg)
    assert [r.to_line(timings=False) for r in again.reports] == \
        [r.to_line(timings=False) for r in group.reports]


def test_dense_benchmark_reports_density():
    (group,) = run_benchmark("dense", 1, RunConfig(SMALL, seed=5))
    (report,) = group.reports
    assert report.n_q == 60
    assert report.density is not None


def test_planted_target_holds_the_query():
    graph, planted, query = _planted_target(seed=17)
    assert graph.n == TARGET_SIZE
    assert 25 <= query.n <= 40
    assert is_connected(query)
    assert induced_subgraph(graph, planted)[0] == query
    assert is_connected(graph)


def test_dense_target_holds_a_dense_block():
    graph, planted = _dense_target(seed=17)
    assert graph.n == TARGET_SIZE
    block, _ = induced_subgraph(graph, planted)
    assert block.n == DENSE_SIZE
    assert block.m >= 0.8 * DENSE_SIZE * (DENSE_SIZE - 1) / 2


@pytest.mark.slow
def test_depth_benchmark_groups():
    groups = run_benchmark("depth", 1, RunConfig(SMALL, seed=9))
    assert [g.name for g in groups] == ["t=1", "t=2", "t=3"]
    assert all(g.summary.count == 1 for g in groups)

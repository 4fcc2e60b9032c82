"""
pipeline.py

End-to-end query execution (selection, seed, growth, completion, score)
and the benchmark suites built on it.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations

from app.entity.experiment_report import ExperimentReport
from app.errors import (ArgumentError, DisconnectedQueryError,
                        ParamsMismatchError)
from app.generators import (attach_subgraph, community_graph, connected_gnp,
                            density, gnp, make_rng,
                            random_connected_subgraph, remove_edges,
                            spawn_seeds)
from app.graph import (IdMap, VertexSet, connected_components,
                       induced_subgraph, is_connected)
from app.graphlets import graphlet_vector, kernel
from app.kdtree import build_index
from app.labeling import LabelParams, check_fingerprint, label_all
from app.matcher import (MatchParams, complete_match, grow_match,
                         seed_match, select_candidates)
from app.time_utils import Stopwatch

logger = logging.getLogger(__name__)

SUITES = ("planted", "noise", "dense", "depth")

# Desk-scale targets of TARGET_SIZE vertices with average degree near 8:
# one sparse connected query community hung off a host of small dense
# clusters through a single connector vertex.
TARGET_SIZE = 300
QUERY_SIZES = (25, 40)
QUERY_P = 0.08
HOST_CLUSTER_SIZE = 12
HOST_P_IN = 0.7
HOST_P_OUT = 0.004
NOISE_FRACTION = 0.05
DENSE_SIZE = 60
DENSE_P = 0.9
DEPTHS = (1, 2, 3)


@dataclass(frozen=True)
class RunConfig:
    """
    Attributes:
        label (LabelParams): Labeling parameters (l, t).
        match (MatchParams): Matching parameters (k, alpha, h1, h2).
        workers (int): Labeling workers.
        seed (int): 64-bit seed of every random choice of a run.
    """

    label: LabelParams = field(default_factory=LabelParams)
    match: MatchParams = field(default_factory=MatchParams)
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.workers < 1:
            raise ArgumentError("worker count must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ArgumentError("seed must be a 64-bit unsigned integer")


class SearchIndex:
    """
    Preprocessed target: graph, vertex labels, and the k-d tree over them.

    Attributes:
        graph (Graph): Target graph.
        labels (LabelSet): Its vertex labels.
        tree (KdIndex): Nearest-neighbor index over `labels`.
        idmap (IdMap): Internal -> external vertex ids.
    """

    def __init__(self, graph, labels, idmap=None):
        if labels.n != graph.n:
            raise ArgumentError(
                f"{labels.n} labels for a graph of {graph.n} vertices")
        self.graph = graph
        self.labels = labels
        self.tree = build_index(labels)
        self.idmap = idmap if idmap is not None else IdMap.identity(graph.n)

    @classmethod
    def build(cls, graph, params, workers=1, idmap=None):
        return cls(graph, label_all(graph, params, workers), idmap)

    @classmethod
    def from_labels(cls, graph, labels, idmap=None):
        """Wrap loaded labels, warning when they belong to another graph."""
        check_fingerprint(labels, graph)
        return cls(graph, labels, idmap)

    @property
    def params(self):
        return self.labels.params


@dataclass
class QueryOutcome:
    """
    Attributes:
        result (MatchResult): Final match and score.
        report (ExperimentReport): Timings and planted-query accounting.
        candidates (VertexSet): R, the selected target vertices.
    """

    result: object
    report: ExperimentReport
    candidates: VertexSet


def run_query(index, q, cfg, planted=None) -> QueryOutcome:
    """
    Match query graph `q` against a preprocessed target.

    Args:
        index (SearchIndex): Target built with cfg.label.
        q (Graph): Connected query graph.
        cfg (RunConfig): Run parameters.
        planted (VertexSet): Target vertices `q` was extracted from, for
            exactMatch / inPruned accounting.

    Raises:
        ParamsMismatchError: Index labels use other LabelParams.
        DisconnectedQueryError: `q` is not connected.
    """
    if index.params != cfg.label:
        raise ParamsMismatchError(
            f"index built with l={index.params.l}, t={index.params.t}; "
            f"run asks for l={cfg.label.l}, t={cfg.label.t}")
    if not is_connected(q):
        raise DisconnectedQueryError("query graph must be connected")
    g = index.graph
    k = cfg.match.k
    if k > g.n:
        logger.warning("k=%d exceeds target size %d; clamping", k, g.n)
        k = g.n

    with Stopwatch() as total:
        with Stopwatch() as labeling:
            query_labels = label_all(q, cfg.label, cfg.workers)
        r, rv = select_candidates(index.tree, query_labels, k)
        seed = seed_match(q, g, r, rv, query_labels, index.labels,
                          cfg.match)
        state = grow_match(seed.pairs, q, g, query_labels, index.labels,
                           cfg.match.h1)
        result = complete_match(state, q, g, cfg.match.h2, cfg.label.l,
                                candidates=len(r), seed=len(seed.s_g))
    logger.debug("query n=%d: |R|=%d seed=%d grown=%d completed=%d",
                 q.n, len(r), result.seed, result.grown, result.completed)

    report = ExperimentReport(
        n_q=q.n,
        matched=result.matched,
        score=result.score,
        exact_match=(planted is not None
                     and tuple(result.target_set) == tuple(planted)),
        in_pruned=planted is not None and planted.issubset(r),
        delta=labeling.elapsed,
        tau=total.elapsed,
    )
    return QueryOutcome(result, report, r)


def score_vertex_set(q, g, vertices, l) -> float:
    """K(Q, G[vertices]) for graphlet size `l`."""
    vertices = VertexSet.of(vertices)
    if not len(vertices):
        raise ArgumentError("vertex list is empty")
    matched, _ = induced_subgraph(g, vertices)
    return kernel(graphlet_vector(q, l), graphlet_vector(matched, l))


@dataclass(frozen=True)
class PlantedQuery:
    """A query graph and, when known, the target vertices it came from."""

    graph: object
    planted: VertexSet = None


@dataclass
class SuiteSummary:
    """Means and counts over the reports of one suite."""

    count: int = 0
    mean_score: float = 0.0
    mean_baseline: float = None
    exact_matches: int = 0
    in_pruned: int = 0
    mean_delta: float = 0.0
    mean_tau: float = 0.0
    mean_density: float = None
    mean_cross: float = None

    @classmethod
    def from_reports(cls, reports):
        if not reports:
            return cls()

        def mean(values):
            values = [v for v in values if v is not None]
            return sum(values) / len(values) if values else None

        return cls(
            count=len(reports),
            mean_score=mean(r.score for r in reports),
            mean_baseline=mean(r.baseline_score for r in reports),
            exact_matches=sum(r.exact_match for r in reports),
            in_pruned=sum(r.in_pruned for r in reports),
            mean_delta=mean(r.delta for r in reports),
            mean_tau=mean(r.tau for r in reports),
            mean_density=mean(r.density for r in reports),
        )

    def to_dict(self, timings=True):
        data = dict(self.__dict__)
        if not timings:
            del data["mean_delta"]
            del data["mean_tau"]
        return data


def run_experiment_suite(index, queries, cfg, baseline=True,
                         with_density=False, first_index=0):
    """
    Run every query against one target.

    Args:
        index (SearchIndex): Preprocessed target.
        queries (list[PlantedQuery]): Queries, planted or external.
        cfg (RunConfig): Parameters; cfg.seed drives the baselines.
        baseline (bool): Also score each query against a random connected
            target subgraph of the same size.
        with_density (bool): Report the density of each match.
        first_index (int): query_index of the first report.

    Returns:
        tuple: (list[ExperimentReport], SuiteSummary)
    """
    seeds = spawn_seeds(cfg.seed, len(queries))
    vectors = [graphlet_vector(q.graph, cfg.label.l) for q in queries]
    reports = []
    for i, query in enumerate(queries):
        outcome = run_query(index, query.graph, cfg, query.planted)
        report = outcome.report
        report.query_index = first_index + i
        if baseline:
            report.baseline_score = random_baseline_score(
                query.graph, index.graph, seeds[i], cfg.label.l)
        if with_density and len(outcome.result.target_set) >= 2:
            matched, _ = induced_subgraph(index.graph,
                                          outcome.result.target_set)
            report.density = density(matched)
        reports.append(report)
    summary = SuiteSummary.from_reports(reports)
    summary.mean_cross = mean_cross_score(vectors)
    return reports, summary


def mean_cross_score(vectors):
    """
    Mean kernel over all pairs of distinct queries, the score one
    community gets against another of the same network. None for fewer
    than two queries.
    """
    if len(vectors) < 2:
        return None
    total = sum(kernel(a, b) for a, b in combinations(vectors, 2))
    return total / (len(vectors) * (len(vectors) - 1) // 2)


def random_baseline_score(q, g, seed, l):
    """
    Score of `q` against a random connected subgraph of `g` of the same
    size, or None when `g` has no component that large.
    """
    try:
        vertices = random_connected_subgraph(g, q.n, seed)
    except ArgumentError:
        return None
    return score_vertex_set(q, g, vertices, l)


def communities_to_queries(g, communities, idmap):
    """
    Planted queries from external-id communities: each community is
    restricted to the target, then to its largest connected piece.
    Communities with fewer than two usable vertices are skipped.
    """
    queries = []
    for members in communities:
        inside = [idmap.forward[x] for x in members if x in idmap.forward]
        if len(inside) < 2:
            continue
        sub, local = induced_subgraph(g, VertexSet.of(inside))
        piece = connected_components(sub)[0]
        if len(piece) < 2:
            continue
        planted = VertexSet.of(local.to_external(v) for v in piece)
        q, _ = induced_subgraph(g, planted)
        queries.append(PlantedQuery(q, planted))
    return queries


def _host_graph(n, seed):
    count = max(1, round(n / HOST_CLUSTER_SIZE))
    base, extra = divmod(n, count)
    sizes = [base + (i < extra) for i in range(count)]
    graph, _ = community_graph(sizes, HOST_P_IN, HOST_P_OUT, seed)
    return graph


def _planted_target(seed):
    """(target, planted vertices, query) for one planted-suite case."""
    seed_size, seed_query, seed_host, seed_attach = spawn_seeds(seed, 4)
    low, high = QUERY_SIZES
    size = int(make_rng(seed_size).integers(low, high + 1))
    query = connected_gnp(size, QUERY_P, seed_query)
    host = _host_graph(TARGET_SIZE - size - 1, seed_host)
    graph, planted = attach_subgraph(host, query, seed_attach)
    return graph, planted, query


def _dense_target(seed):
    seed_host, seed_block, seed_attach = spawn_seeds(seed, 3)
    host = _host_graph(TARGET_SIZE - DENSE_SIZE - 1, seed_host)
    block = gnp(DENSE_SIZE, DENSE_P, seed_block)
    return attach_subgraph(host, block, seed_attach)


@dataclass
class BenchGroup:
    """Reports of one benchmark configuration."""

    name: str
    reports: list
    summary: SuiteSummary


def run_benchmark(suite, repeats, cfg):
    """
    Synthetic benchmark suites.

    - planted: a sparse connected community of 25-40 vertices, attached
      to a host of dense clusters, is the query; 300 target vertices.
    - noise: the same, with 5% of the target edges removed.
    - dense: an independent G(60, 0.9) query against the host with an
      attached G(60, 0.9) block; match density is reported.
    - depth: the planted suite for every BFS depth in DEPTHS.

    Returns:
        list[BenchGroup]
    """
    if suite not in SUITES:
        raise ArgumentError(f"unknown suite {suite!r}; choose from {SUITES}")
    if repeats < 1:
        raise ArgumentError("repeats must be positive")
    if suite == "depth":
        groups = []
        for t in DEPTHS:
            depth_cfg = RunConfig(LabelParams(t=t, l=cfg.label.l),
                                  cfg.match, cfg.workers, cfg.seed)
            group = run_benchmark("planted", repeats, depth_cfg)[0]
            group.name = f"t={t}"
            groups.append(group)
        return groups

    reports = []
    for i, case_seed in enumerate(spawn_seeds(cfg.seed, repeats)):
        seed_target, seed_noise, seed_query, seed_run = \
            spawn_seeds(case_seed, 4)
        if suite == "dense":
            target, planted = _dense_target(seed_target)
            query = gnp(DENSE_SIZE, DENSE_P, seed_query)
        else:
            target, planted, query = _planted_target(seed_target)
            if suite == "noise":
                target = remove_edges(target, NOISE_FRACTION, seed_noise)
        index = SearchIndex.build(target, cfg.label, cfg.workers)
        case_cfg = RunConfig(cfg.label, cfg.match, cfg.workers, seed_run)
        case_reports, _ = run_experiment_suite(
            index, [PlantedQuery(query, planted)], case_cfg,
            with_density=suite == "dense", first_index=i)
        reports.extend(case_reports)
    return [BenchGroup(suite, reports, SuiteSummary.from_reports(reports))]

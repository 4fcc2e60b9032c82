"""
matcher.py

The matching phase: candidate selection by label k-NN, seed matching on a
neighborhood-weighted bipartite graph, heap-driven match growing, and
Jaccard-based completion of the boundary.

Mappings always run query id -> target id.
"""
import heapq
import logging
import math
from dataclasses import dataclass

import numpy as np

from app.entity.match_result import MatchResult
from app.errors import ArgumentError
from app.graph import VertexSet, connected_components, induced_subgraph
from app.graphlets import graphlet_vector, kernel
from app.matching import BipartiteInstance, max_weight_bipartite_matching

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchParams:
    """
    Attributes:
        k (int): Nearest neighbors selected per query vertex.
        alpha (float): Scale factor of the seed edge weight, in (0, 1).
        h1 (float): Similarity threshold of the growing phase.
        h2 (float): Jaccard threshold of the completion phase.
    """

    k: int = 10
    alpha: float = 0.3
    h1: float = 0.4
    h2: float = 0.95

    def __post_init__(self):
        if self.k < 1:
            raise ArgumentError("k must be at least 1")
        if not 0 < self.alpha < 1:
            raise ArgumentError("alpha must lie in (0, 1)")
        for name in ("h1", "h2"):
            if not 0 <= getattr(self, name) <= 1:
                raise ArgumentError(f"{name} must lie in [0, 1]")


def similarity(fu, fv) -> float:
    """s(u, v): dot product of two labels."""
    a = np.asarray(getattr(fu, "values", fu), dtype=np.float64)
    b = np.asarray(getattr(fv, "values", fv), dtype=np.float64)
    if a.shape != b.shape:
        raise ArgumentError(
            f"labels of shape {a.shape} and {b.shape} are not comparable")
    return float(np.dot(a, b))


def jaccard(a, b) -> float:
    """|a & b| / |a | b|, defined as 0 when both sets are empty."""
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def select_candidates(index, query_labels, k):
    """
    Selection phase.

    Args:
        index (KdIndex): Index over the target labels.
        query_labels (LabelSet): Labels of the query vertices.
        k (int): Neighbors per query vertex.

    Returns:
        tuple: (R as VertexSet, dict query id -> list of target ids)
    """
    if query_labels.dimension != index.dimension:
        raise ArgumentError(
            f"query labels of dimension {query_labels.dimension} against "
            f"an index of dimension {index.dimension}")
    rv = {}
    for v in range(query_labels.n):
        rv[v] = [w for w, _ in index.query(query_labels.labels[v], k)]
    r = VertexSet.of(w for ids in rv.values() for w in ids)
    return r, rv


def _invert(rv):
    inverse = {}
    for u in sorted(rv):
        for z in rv[u]:
            inverse.setdefault(z, []).append(u)
    return inverse


def lambda_weight(v, w, rv, g, query_labels, target_labels, alpha,
                  inverse=None) -> float:
    """
    Seed edge weight of query vertex `v` and target vertex `w`.

    Q' holds the other query vertices with a selection edge into w's
    closed neighborhood V_w; s(u) is the best similarity of u to those
    targets. The weight is the alpha power mean of s(v, w) and the s(u),
    scaled by 1 / (|Q'| + 1). It reduces to s(v, w) when Q' is empty.

    Args:
        inverse (dict): Optional target id -> query ids map of `rv`,
            shared between calls on the same selection.
    """
    if w not in rv.get(v, ()):
        raise ArgumentError(f"target {w} was not selected for query {v}")
    if inverse is None:
        inverse = _invert(rv)
    lq, lt = query_labels.labels, target_labels.labels
    best = {}
    for z in [w] + g.neighbors(w).tolist():
        for u in inverse.get(z, ()):
            if u == v:
                continue
            s = float(np.dot(lq[u], lt[z]))
            if s > best.get(u, -1.0):
                best[u] = s
    total = math.fsum([float(np.dot(lq[v], lt[w])) ** alpha]
                      + [best[u] ** alpha for u in sorted(best)])
    return total ** (1.0 / alpha) / (len(best) + 1)


@dataclass(frozen=True)
class SeedMatch:
    """
    Attributes:
        s_g (VertexSet): Target vertices of the seed component.
        s_q (VertexSet): Their query partners.
        pairs (tuple): (query id, target id) pairs of the seed.
        matching_size (int): |M| before restricting to one component.
    """

    s_g: VertexSet = VertexSet()
    s_q: VertexSet = VertexSet()
    pairs: tuple = ()
    matching_size: int = 0

    @property
    def is_empty(self) -> bool:
        return not self.pairs


def seed_match(q, g, r, rv, query_labels, target_labels, params):
    """
    Seed match generation.

    Solves the lambda-weighted bipartite matching between V(Q) and R, then
    keeps the pairs whose target lies in the largest connected component
    of the matched target subgraph G_M.

    Returns:
        SeedMatch: Empty (and logged) when nothing could be matched.
    """
    inverse = _invert(rv)
    edges = [
        (v, w, lambda_weight(v, w, rv, g, query_labels, target_labels,
                             params.alpha, inverse))
        for v in sorted(rv) for w in rv[v]
    ]
    instance = BipartiteInstance(tuple(range(q.n)), r.members, tuple(edges))
    matching = max_weight_bipartite_matching(instance)
    if not matching.pairs:
        logger.warning("seed matching is empty (|R|=%d)", len(r))
        return SeedMatch()
    matched = VertexSet.of(w for _, w in matching.pairs)
    g_m, local = induced_subgraph(g, matched)
    largest = connected_components(g_m)[0]
    s_g = VertexSet.of(local.to_external(i) for i in largest)
    pairs = tuple((v, w) for v, w in matching.pairs if w in s_g)
    logger.debug("seed: |M|=%d, |S_G|=%d", len(matching), len(s_g))
    return SeedMatch(s_g, VertexSet.of(v for v, _ in pairs), pairs,
                     len(matching))


class MatchState:
    """
    Partial match F plus the candidate max-heap of the growing phase.

    Heap entries are (-s, query, target); ties pop the smaller query id,
    then the smaller target id. A replaced candidate leaves its old entry
    in the heap, and `pop` skips entries that no longer agree with the
    live candidate of their query. Live candidates and F are jointly
    one-to-one on both sides.
    """

    def __init__(self):
        self.mapping = {}
        self.matched_targets = {}
        self.live = {}
        self.live_targets = {}
        self._heap = []

    def __len__(self):
        return len(self.live)

    def live_entry(self, query):
        """(target, score) currently held for `query`, or None."""
        return self.live.get(query)

    def offer(self, query, target, score, h1) -> bool:
        """
        Insert (target, query) when `query` has no live candidate and
        score >= h1, or replace its candidate when `score` is higher.

        Returns:
            bool: True when the heap changed.
        """
        if query in self.mapping or target in self.matched_targets:
            raise ArgumentError(
                f"pair ({query}, {target}) involves a matched vertex")
        holder = self.live_targets.get(target)
        if holder is not None and holder != query:
            raise ArgumentError(
                f"target {target} is already a candidate of {holder}")
        current = self.live.get(query)
        if current is None:
            if score < h1:
                return False
        elif score <= current[1]:
            return False
        else:
            del self.live_targets[current[0]]
        self.live[query] = (target, score)
        self.live_targets[target] = query
        heapq.heappush(self._heap, (-score, query, target))
        return True

    def pop(self):
        """
        Move the best live candidate into F.

        Returns:
            tuple: (query, target, score), or None when no candidate is left.
        """
        while self._heap:
            neg_score, query, target = heapq.heappop(self._heap)
            if self.live.get(query) != (target, -neg_score):
                continue
            del self.live[query]
            del self.live_targets[target]
            self.mapping[query] = target
            self.matched_targets[target] = query
            return query, target, -neg_score
        return None


def _update_candidates(state, x, y, q, g, lq, lt, h1):
    free_targets = [z for z in g.neighbors(x).tolist()
                    if z not in state.matched_targets
                    and z not in state.live_targets]
    free_queries = [u for u in q.neighbors(y).tolist()
                    if u not in state.mapping]
    for query in free_queries:
        if not free_targets:
            break
        scores = lt[free_targets] @ lq[query]
        best = int(np.argmax(scores))
        if state.offer(query, free_targets[best], float(scores[best]), h1):
            free_targets.pop(best)


def grow_match(seed_pairs, q, g, query_labels, target_labels, h1):
    """
    Match growing.

    The heap starts with the seed pairs whose similarity reaches `h1`.
    Each popped pair (query y, target x) joins F; then every unmatched
    query neighbor of y is offered its most similar target among the
    neighbors of x that are neither matched nor held by a candidate.

    Returns:
        MatchState: State with the final F and an empty heap.
    """
    lq, lt = query_labels.labels, target_labels.labels
    state = MatchState()
    for v, w in sorted(seed_pairs):
        state.offer(v, w, float(np.dot(lq[v], lt[w])), h1)
    while True:
        popped = state.pop()
        if popped is None:
            break
        y, x, _ = popped
        _update_candidates(state, x, y, q, g, lq, lt, h1)
    logger.debug("grown match covers %d query vertices", len(state.mapping))
    return state


def complete_match(state, q, g, h2, graphlet_size=4, candidates=0,
                   seed=0) -> MatchResult:
    """
    Match completion and scoring.

    Unmatched target neighbors X of the match are paired with unmatched
    query vertices Y by a maximum-weight matching over the Jaccard
    coefficients c(v, w) >= h2 of their already-matched neighborhoods.
    The result is scored with K(Q, G*), G* induced by the matched targets.
    """
    mapping = dict(state.mapping)
    partner = {t: v for v, t in mapping.items()}
    boundary = sorted({z for t in partner for z in g.neighbors(t).tolist()
                       if z not in partner})
    open_queries = [u for u in range(q.n) if u not in mapping]
    matched_nbrs = {
        w: {u for u in q.neighbors(w).tolist() if u in mapping}
        for w in open_queries
    }
    edges = []
    for v in boundary:
        mapped = {partner[z] for z in g.neighbors(v).tolist()
                  if z in partner}
        for w in open_queries:
            c = jaccard(mapped, matched_nbrs[w])
            if c >= h2:
                edges.append((w, v, c))
    completion = max_weight_bipartite_matching(
        BipartiteInstance(tuple(open_queries), tuple(boundary),
                          tuple(edges)))
    mapping.update(completion.pairs)

    target_set = VertexSet.of(mapping.values())
    matched_graph, _ = induced_subgraph(g, target_set)
    score = kernel(graphlet_vector(q, graphlet_size),
                   graphlet_vector(matched_graph, graphlet_size))
    return MatchResult(
        mapping=mapping,
        target_set=target_set.members,
        score=score,
        n_query=q.n,
        candidates=candidates,
        seed=seed,
        grown=len(state.mapping),
        completed=len(completion),
    )

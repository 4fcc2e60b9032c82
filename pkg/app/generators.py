"""
generators.py

Seeded graph generators and perturbations for experiments.

All randomness comes from numpy's PCG64 generator (`numpy.random.
default_rng(seed)`), so a seed reproduces the same graphs on every
platform running the same numpy.
"""
import math

import numpy as np

from app.errors import ArgumentError
from app.graph import Graph, VertexSet, connected_components


def make_rng(seed):
    """PCG64 generator for a non-negative 64-bit seed."""
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def spawn_seeds(seed, count):
    """`count` independent 63-bit seeds derived from `seed`."""
    rng = make_rng(seed)
    return [int(s) for s in rng.integers(0, 2 ** 63 - 1, size=count)]


def _check_probability(p, name="p"):
    if not 0 <= p <= 1:
        raise ArgumentError(f"{name} must lie in [0, 1]")


def gnp(n, p, seed) -> Graph:
    """
    Erdos-Renyi G(n, p): each unordered pair is an edge with probability p.
    """
    _check_probability(p)
    if n < 0:
        raise ArgumentError("n must be non-negative")
    rng = make_rng(seed)
    edges = []
    for u in range(n - 1):
        hits = np.flatnonzero(rng.random(n - u - 1) < p) + u + 1
        edges.append(np.column_stack([np.full(len(hits), u), hits]))
    if not edges:
        return Graph.empty(n)
    return Graph.from_edges(n, np.concatenate(edges))


def remove_edges(g, fraction, seed) -> Graph:
    """Delete floor(fraction * m) edges chosen uniformly at random."""
    _check_probability(fraction, "fraction")
    edges = g.edge_array()
    drop = int(math.floor(fraction * len(edges)))
    if drop == 0:
        return g
    rng = make_rng(seed)
    removed = rng.choice(len(edges), size=drop, replace=False)
    keep = np.ones(len(edges), dtype=bool)
    keep[removed] = False
    return Graph.from_edges(g.n, edges[keep])


def random_connected_subgraph(g, size, seed) -> VertexSet:
    """
    Random vertex set of `size` vertices inducing a connected subgraph.

    Starts from a uniformly chosen vertex of a component with at least
    `size` vertices and repeatedly adds a uniformly chosen vertex of the
    current frontier.
    """
    if size < 1 or size > g.n:
        raise ArgumentError(f"cannot extract {size} vertices from n={g.n}")
    eligible = [v for comp in connected_components(g) if len(comp) >= size
                for v in comp]
    if not eligible:
        raise ArgumentError(f"no connected component has {size} vertices")
    eligible.sort()
    rng = make_rng(seed)
    start = eligible[int(rng.integers(len(eligible)))]
    chosen = {start}
    frontier = []
    in_frontier = set()

    def push_neighbors(v):
        for w in g.neighbors(v).tolist():
            if w not in chosen and w not in in_frontier:
                in_frontier.add(w)
                frontier.append(w)

    push_neighbors(start)
    while len(chosen) < size:
        pick = int(rng.integers(len(frontier)))
        v = frontier[pick]
        frontier[pick] = frontier[-1]
        frontier.pop()
        in_frontier.discard(v)
        chosen.add(v)
        push_neighbors(v)
    return VertexSet.of(chosen)


def density(g) -> float:
    """rho = 2m / (n (n - 1))."""
    if g.n < 2:
        raise ArgumentError("density needs at least two vertices")
    return 2.0 * g.m / (g.n * (g.n - 1))


def community_graph(sizes, p_in, p_out, seed):
    """
    Planted-partition graph: consecutive blocks of the given sizes, pairs
    inside a block joined with probability `p_in`, across blocks with
    probability `p_out`.

    Returns:
        tuple: (Graph, list of community VertexSets)
    """
    _check_probability(p_in, "p_in")
    _check_probability(p_out, "p_out")
    sizes = [int(s) for s in sizes]
    n = sum(sizes)
    block = np.repeat(np.arange(len(sizes)), sizes)
    rng = make_rng(seed)
    edges = []
    for u in range(n - 1):
        others = np.arange(u + 1, n)
        p = np.where(block[others] == block[u], p_in, p_out)
        hits = others[rng.random(len(others)) < p]
        edges.append(np.column_stack([np.full(len(hits), u), hits]))
    graph = Graph.from_edges(n, np.concatenate(edges)) if edges \
        else Graph.empty(n)
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    communities = [VertexSet.of(range(bounds[i], bounds[i + 1]))
                   for i in range(len(sizes))]
    return graph, communities


def connected_gnp(n, p, seed) -> Graph:
    """
    G(n, p) joined with a random recursive tree, so the result is always
    connected: in a random vertex order, each vertex attaches to a
    uniformly chosen earlier one.
    """
    if n < 1:
        raise ArgumentError("n must be positive")
    seed_tree, seed_extra = spawn_seeds(seed, 2)
    rng = make_rng(seed_tree)
    order = rng.permutation(n)
    parents = [order[int(rng.integers(i))] for i in range(1, n)]
    tree = np.column_stack([order[1:], parents]) if n > 1 \
        else np.empty((0, 2), dtype=np.int64)
    extra = gnp(n, p, seed_extra).edge_array()
    return Graph.from_edges(n, np.concatenate([tree, extra]))


def attach_subgraph(host, pattern, seed):
    """
    Disjoint union of `host` and `pattern`, joined through one new
    connector vertex adjacent to a random vertex of each side.

    Host vertices keep their ids, the connector gets id host.n and the
    pattern vertices follow it in order.

    Returns:
        tuple: (Graph, VertexSet of pattern vertices)
    """
    if host.n < 1 or pattern.n < 1:
        raise ArgumentError("host and pattern must not be empty")
    rng = make_rng(seed)
    connector = host.n
    offset = host.n + 1
    anchor_host = int(rng.integers(host.n))
    anchor_pattern = offset + int(rng.integers(pattern.n))
    edges = np.concatenate([
        host.edge_array(),
        pattern.edge_array() + offset,
        [(anchor_host, connector), (connector, anchor_pattern)],
    ])
    placed = VertexSet.of(range(offset, offset + pattern.n))
    return Graph.from_edges(offset + pattern.n, edges), placed

"""
graphlets.py

Catalog of connected graphlets on 3-5 vertices, exact induced graphlet
counting, graphlet vectors and the graphlet kernel.

Edge sets of an l-vertex graph are encoded as bitmasks over the vertex
pairs (0,1), (0,2), ..., (l-2,l-1) in row-major order, pair i on bit i.
The canonical code of a graph is the largest mask reachable by permuting
its vertices.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np
from scipy import sparse

from app.errors import ArgumentError
from app.graph import Graph, is_connected

logger = logging.getLogger(__name__)

GRAPHLET_SIZES = (3, 4, 5)
EXPECTED_DIMENSION = {3: 2, 4: 6, 5: 21}
CLASS_NAMES = {
    3: ("P3", "K3"),
    4: ("P4", "star", "C4", "paw", "diamond", "K4"),
}
ORACLE_MAX_N = 14


def _check_size(l):
    if l not in GRAPHLET_SIZES:
        raise ArgumentError(f"graphlet size must be one of {GRAPHLET_SIZES}")


def _mask_connected(mask, pairs, l):
    adj = [[] for _ in range(l)]
    for bit, (i, j) in enumerate(pairs):
        if mask >> bit & 1:
            adj[i].append(j)
            adj[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == l


class GraphletCatalog:
    """
    All connected non-isomorphic graphs on `l` vertices.

    Classes are ordered by edge count, then by canonical code. For l = 4
    this gives (P4, star, C4, paw, diamond, K4); for l = 3 (P3, K3).

    Attributes:
        l (int): Graphlet size.
        pairs (tuple): Vertex pair of each mask bit.
        pair_bit (list): pair_bit[i][j] is the bit of pair (i, j), i != j.
        classes (tuple): Canonical code of each class.
        lookup (list): Class index of every labelled mask, -1 when the
            mask describes a disconnected graph.
    """

    def __init__(self, l):
        _check_size(l)
        self.l = l
        self.pairs = tuple(combinations(range(l), 2))
        index = {pair: bit for bit, pair in enumerate(self.pairs)}
        self.pair_bit = [[index.get((min(i, j), max(i, j)), -1)
                          for j in range(l)] for i in range(l)]
        perm_bits = [
            [index[tuple(sorted((perm[i], perm[j])))] for i, j in self.pairs]
            for perm in permutations(range(l))
        ]

        canon = {}
        for mask in range(1 << len(self.pairs)):
            if not _mask_connected(mask, self.pairs, l):
                continue
            bits = [b for b in range(len(self.pairs)) if mask >> b & 1]
            canon[mask] = max(sum(1 << pb[b] for b in bits)
                              for pb in perm_bits)

        self.classes = tuple(sorted(set(canon.values()),
                                    key=lambda c: (bin(c).count("1"), c)))
        if len(self.classes) != EXPECTED_DIMENSION[l]:
            raise AssertionError(
                f"catalog for l={l} has {len(self.classes)} classes, "
                f"expected {EXPECTED_DIMENSION[l]}")
        position = {code: i for i, code in enumerate(self.classes)}
        self.lookup = [-1] * (1 << len(self.pairs))
        for mask, code in canon.items():
            self.lookup[mask] = position[code]

    @property
    def dimension(self) -> int:
        return len(self.classes)

    def names(self):
        return CLASS_NAMES.get(
            self.l, tuple(f"G{self.l}_{i}" for i in range(self.dimension)))

    def representative(self, index) -> Graph:
        """The canonical representative of class `index` as a Graph."""
        code = self.classes[index]
        edges = [pair for bit, pair in enumerate(self.pairs)
                 if code >> bit & 1]
        return Graph.from_edges(self.l, edges)

    def mask_of(self, g) -> int:
        mask = 0
        for u, v in g.edges():
            mask |= 1 << self.pair_bit[u][v]
        return mask


@lru_cache(maxsize=None)
def get_catalog(l) -> GraphletCatalog:
    """Shared, lazily built catalog for graphlet size `l`."""
    return GraphletCatalog(l)


@dataclass(frozen=True, eq=False)
class GraphletVector:
    """
    L2-normalized graphlet frequency vector, or the zero vector when the
    graph has no connected induced subgraph on `l` vertices.
    """

    l: int
    values: np.ndarray

    @classmethod
    def from_counts(cls, l, counts):
        counts = np.asarray(counts, dtype=np.float64)
        norm = np.linalg.norm(counts)
        values = counts / norm if norm > 0 else np.zeros_like(counts)
        values.setflags(write=False)
        return cls(l, values)

    @property
    def dimension(self) -> int:
        return len(self.values)

    @property
    def is_zero(self) -> bool:
        return not self.values.any()

    def __eq__(self, other):
        if not isinstance(other, GraphletVector):
            return NotImplemented
        return self.l == other.l and np.array_equal(self.values,
                                                    other.values)

    def __hash__(self):
        return hash((self.l, self.values.tobytes()))


def classify(g) -> int:
    """
    Catalog index of the class isomorphic to `g`.

    Args:
        g (Graph): Connected graph with 3 <= n <= 5.

    Returns:
        int: Class index in the size-n catalog.
    """
    if g.n not in GRAPHLET_SIZES:
        raise ArgumentError(f"cannot classify a graph on {g.n} vertices")
    if not is_connected(g):
        raise ArgumentError("cannot classify a disconnected graph")
    catalog = get_catalog(g.n)
    return catalog.lookup[catalog.mask_of(g)]


def count_graphlets(g, l):
    """
    Induced counts of every connected graphlet of size `l` in `g`.

    Connected l-vertex subsets are enumerated with the ESU scheme: each
    subset is grown from its smallest vertex through exclusive neighbors,
    so every subset is visited once.

    Returns:
        np.ndarray: int64 counts in catalog order.
    """
    catalog = get_catalog(l)
    counts = np.zeros(catalog.dimension, dtype=np.int64)
    if g.n < l:
        return counts
    adj = [set(nbrs) for nbrs in g.adjacency_lists()]
    pair_bit = catalog.pair_bit
    lookup = catalog.lookup
    tally = [0] * catalog.dimension

    def extend(sub, closed, ext, root, mask):
        pos = len(sub)
        ext = list(ext)
        while ext:
            w = ext.pop()
            adj_w = adj[w]
            grown = mask
            for i, x in enumerate(sub):
                if x in adj_w:
                    grown |= 1 << pair_bit[i][pos]
            if pos + 1 == l:
                tally[lookup[grown]] += 1
                continue
            next_ext = ext + [u for u in adj_w
                              if u > root and u not in closed]
            extend(sub + [w], closed | adj_w, next_ext, root, grown)

    for root in range(g.n):
        ext = [u for u in adj[root] if u > root]
        extend([root], adj[root] | {root}, ext, root, 0)
    counts[:] = tally
    return counts


def count_graphlets_oracle(g, l):
    """
    Same contract as `count_graphlets`, by scanning all C(n, l) subsets.
    Only meant for verification on small graphs.
    """
    catalog = get_catalog(l)
    if g.n > ORACLE_MAX_N:
        raise ArgumentError(
            f"oracle refuses graphs with more than {ORACLE_MAX_N} vertices")
    counts = np.zeros(catalog.dimension, dtype=np.int64)
    adj = [set(nbrs) for nbrs in g.adjacency_lists()]
    for subset in combinations(range(g.n), l):
        mask = 0
        for bit, (i, j) in enumerate(catalog.pairs):
            if subset[j] in adj[subset[i]]:
                mask |= 1 << bit
        index = catalog.lookup[mask]
        if index >= 0:
            counts[index] += 1
    return counts


def count_graphlets_combinatorial(g, l):
    """
    Induced graphlet counts for l in {3, 4} from closed-form subgraph
    counts.

    Non-induced copies of each 4-vertex pattern are counted from degrees,
    edge co-degrees, per-vertex triangles, codegree pairs and cliques among
    common neighbors, then converted to induced counts by inverting the
    pattern containment table (a K4 holds 12 P4, 4 stars, 3 C4, 12 paws and
    6 diamonds, and so on).
    """
    if l not in (3, 4):
        raise ArgumentError("combinatorial counting supports l = 3 or 4")
    dim = EXPECTED_DIMENSION[l]
    if g.n < l or g.m == 0:
        return np.zeros(dim, dtype=np.int64)

    a = g.adjacency_matrix()
    deg = g.degrees().astype(np.int64)
    eu, ev = g.edge_array().T
    common = a[eu].multiply(a[ev]).tocsr()
    codeg = np.asarray(common.sum(axis=1), dtype=np.int64).ravel()
    triangles = int(codeg.sum()) // 3
    wedges = int((deg * (deg - 1) // 2).sum())
    if l == 3:
        return np.array([wedges - 3 * triangles, triangles], dtype=np.int64)

    tri_at = np.zeros(g.n, dtype=np.int64)
    np.add.at(tri_at, eu, codeg)
    np.add.at(tri_at, ev, codeg)
    tri_at //= 2

    paths = int(((deg[eu] - 1) * (deg[ev] - 1)).sum()) - 3 * triangles
    stars = int((deg * (deg - 1) * (deg - 2) // 6).sum())
    codegree = sparse.triu(a @ a, k=1).tocsr()
    cycles = int((codegree.data * (codegree.data - 1) // 2).sum()) // 2
    paws = int((tri_at * (deg - 2)).sum())
    diamonds = int((codeg * (codeg - 1) // 2).sum())
    cliques = int((common @ a).multiply(common).sum()) // 12

    diamonds -= 6 * cliques
    paws -= 4 * diamonds + 12 * cliques
    cycles -= diamonds + 3 * cliques
    stars -= paws + 2 * diamonds + 4 * cliques
    paths -= 4 * cycles + 2 * paws + 6 * diamonds + 12 * cliques
    return np.array([paths, stars, cycles, paws, diamonds, cliques],
                    dtype=np.int64)


def graphlet_counts(g, l, method="auto"):
    """
    Dispatch to a counting method.

    Args:
        method (str): "esu" always enumerates; "auto" uses the
            combinatorial counts for l <= 4 and enumeration for l = 5.
    """
    _check_size(l)
    if method == "esu" or (method == "auto" and l == 5):
        return count_graphlets(g, l)
    if method == "auto":
        return count_graphlets_combinatorial(g, l)
    raise ArgumentError(f"unknown counting method {method!r}")


def graphlet_vector(g, l, method="auto") -> GraphletVector:
    """Normalized graphlet vector f_G of `g` for graphlet size `l`."""
    return GraphletVector.from_counts(l, graphlet_counts(g, l, method))


def kernel(f1, f2) -> float:
    """
    Graphlet kernel K = f1 . f2, clamped to [0, 1] against rounding.
    """
    if f1.l != f2.l or f1.dimension != f2.dimension:
        raise ArgumentError(
            f"cannot compare graphlet vectors of size {f1.l} and {f2.l}")
    value = float(np.dot(f1.values, f2.values))
    return min(1.0, max(0.0, value))

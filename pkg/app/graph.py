"""
graph.py

Immutable undirected simple graphs in compressed sorted-adjacency form,
edge-list ingestion, and the traversals every other module builds on.
"""
import hashlib
import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from app.errors import ArgumentError, ParseError

logger = logging.getLogger(__name__)


class Graph:
    """
    Undirected simple graph over dense vertex ids 0..n-1.

    Adjacency is kept as two int64 arrays (`indptr`, `indices`) with every
    neighbor list sorted ascending. Instances are never mutated after
    construction, so they can be shared freely between workers.
    """

    __slots__ = ("_indptr", "_indices", "_fingerprint")

    def __init__(self, indptr, indices):
        """
        Wrap already-validated CSR arrays. Use `Graph.from_edges` to build
        a graph from arbitrary edge input.

        Args:
            indptr (np.ndarray): Offsets of length n + 1.
            indices (np.ndarray): Concatenated sorted neighbor lists.
        """
        self._indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self._indices = np.ascontiguousarray(indices, dtype=np.int64)
        self._indptr.setflags(write=False)
        self._indices.setflags(write=False)
        self._fingerprint = None

    @classmethod
    def from_edges(cls, n, edges):
        """
        Build a graph on `n` vertices. Self-loops and repeated edges
        (in either direction) are dropped.

        Args:
            n (int): Vertex count.
            edges (iterable): Pairs (u, v) with 0 <= u, v < n.

        Returns:
            Graph: The simple undirected graph.
        """
        n = int(n)
        if n < 0:
            raise ArgumentError("vertex count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray)
                         else edges, dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ArgumentError("edge endpoint out of range")
        arr = arr[arr[:, 0] != arr[:, 1]]
        both = np.concatenate([arr, arr[:, ::-1]])
        if both.size:
            both = np.unique(both, axis=0)
        counts = np.bincount(both[:, 0], minlength=n) if both.size \
            else np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = both[:, 1] if both.size else np.zeros(0, dtype=np.int64)
        return cls(indptr, indices)

    @classmethod
    def empty(cls, n):
        """Edgeless graph on `n` vertices."""
        return cls(np.zeros(n + 1, dtype=np.int64),
                   np.zeros(0, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self._indptr) - 1

    @property
    def m(self) -> int:
        return len(self._indices) // 2

    @property
    def indptr(self):
        return self._indptr

    @property
    def indices(self):
        return self._indices

    def neighbors(self, v):
        """Sorted neighbor ids of `v` (read-only view)."""
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def degree(self, v) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def degrees(self):
        return np.diff(self._indptr)

    def has_edge(self, u, v) -> bool:
        nbrs = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        return bool(pos < len(nbrs) and nbrs[pos] == v)

    def edge_array(self):
        """
        Returns:
            np.ndarray: m x 2 array of edges (u, v) with u < v, sorted.
        """
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        keep = src < self._indices
        return np.column_stack([src[keep], self._indices[keep]])

    def edges(self):
        """Iterate edges as (u, v) tuples with u < v."""
        for u, v in self.edge_array():
            yield int(u), int(v)

    def adjacency_lists(self):
        """Neighbor lists as plain Python lists of ints."""
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def adjacency_matrix(self):
        """
        Returns:
            scipy.sparse.csr_matrix: n x n 0/1 matrix of dtype int64.
        """
        data = np.ones(len(self._indices), dtype=np.int64)
        return sparse.csr_matrix((data, self._indices, self._indptr),
                                 shape=(self.n, self.n))

    def fingerprint(self) -> bytes:
        """
        SHA-256 over the vertex count and the adjacency arrays; two graphs
        share a fingerprint exactly when their internal structure is equal.
        """
        if self._fingerprint is None:
            digest = hashlib.sha256()
            digest.update(np.int64(self.n).astype("<i8").tobytes())
            digest.update(self._indptr.astype("<i8").tobytes())
            digest.update(self._indices.astype("<i8").tobytes())
            self._fingerprint = digest.digest()
        return self._fingerprint

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self._indptr, other._indptr)
                and np.array_equal(self._indices, other._indices))

    def __hash__(self):
        return hash(self.fingerprint())

    def __getstate__(self):
        return {"indptr": np.array(self._indptr),
                "indices": np.array(self._indices)}

    def __setstate__(self, state):
        self.__init__(state["indptr"], state["indices"])

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class VertexSet:
    """Sorted, duplicate-free set of vertex ids of some parent graph."""

    members: tuple = ()
    _lookup: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        members = tuple(sorted({int(i) for i in self.members}))
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_lookup", frozenset(members))

    @classmethod
    def of(cls, ids):
        return cls(tuple(ids))

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self._lookup

    def issubset(self, other) -> bool:
        return self._lookup <= frozenset(other)

    def as_array(self):
        return np.asarray(self.members, dtype=np.int64)

    def _check_range(self, n):
        if self.members and (self.members[0] < 0 or self.members[-1] >= n):
            raise ArgumentError(
                f"vertex set member out of range for n={n}")


@dataclass(frozen=True)
class IdMap:
    """
    Bijection between external ids and dense internal ids.

    Attributes:
        backward (tuple): internal id -> external id.
        forward (dict): external id -> internal id.
    """

    backward: tuple
    forward: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_external(cls, external_ids):
        backward = tuple(int(x) for x in external_ids)
        forward = {ext: i for i, ext in enumerate(backward)}
        if len(forward) != len(backward):
            raise ArgumentError("external ids must be unique")
        return cls(backward, forward)

    @classmethod
    def identity(cls, n):
        return cls.from_external(range(n))

    def __len__(self):
        return len(self.backward)

    def to_internal(self, external_id) -> int:
        try:
            return self.forward[int(external_id)]
        except KeyError:
            raise ArgumentError(f"unknown vertex id {external_id}") from None

    def to_external(self, internal_id) -> int:
        return self.backward[internal_id]


def _tokenize(text_stream):
    for line_no, raw in enumerate(text_stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise ParseError(f"invalid UTF-8 at byte {e.start}",
                                 line_no) from None
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line.split()


def parse_edge_list(text_stream):
    """
    Parse a whitespace-separated edge list ('#' starts a comment line).

    External ids are remapped densely in ascending order; self-loops and
    duplicate edges are dropped silently.

    Args:
        text_stream (iterable of str or bytes): Lines of the file; bytes
            lines are decoded as UTF-8.

    Returns:
        tuple: (Graph, IdMap)

    Raises:
        ParseError: On a non-integer token or a wrong token count.
    """
    pairs = []
    for line_no, tokens in _tokenize(text_stream):
        if len(tokens) != 2:
            raise ParseError(
                f"expected 2 tokens, found {len(tokens)}", line_no)
        try:
            pairs.append((int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise ParseError(f"non-integer token in {tokens!r}",
                             line_no) from None
    external = sorted({x for pair in pairs for x in pair})
    idmap = IdMap.from_external(external)
    edges = [(idmap.forward[a], idmap.forward[b]) for a, b in pairs]
    graph = Graph.from_edges(len(external), edges)
    logger.debug("parsed edge list: n=%d m=%d (%d input lines)",
                 graph.n, graph.m, len(pairs))
    return graph, idmap


def parse_vertex_list(text_stream):
    """
    Parse one integer id per line ('#' comments allowed).

    Returns:
        list[int]: Ids in file order.
    """
    ids = []
    for line_no, tokens in _tokenize(text_stream):
        if len(tokens) != 1:
            raise ParseError(
                f"expected 1 token, found {len(tokens)}", line_no)
        try:
            ids.append(int(tokens[0]))
        except ValueError:
            raise ParseError(f"non-integer token {tokens[0]!r}",
                             line_no) from None
    return ids


def parse_community_list(text_stream):
    """
    Parse one community per line, members as whitespace-separated ids
    ('#' comments allowed).

    Returns:
        list[list[int]]
    """
    communities = []
    for line_no, tokens in _tokenize(text_stream):
        try:
            communities.append([int(tok) for tok in tokens])
        except ValueError:
            raise ParseError(f"non-integer token in {tokens!r}",
                             line_no) from None
    return communities


def read_edge_list(path):
    """
    Parse `path` with `parse_edge_list`. Lines are decoded as UTF-8 one at
    a time, so a bad byte is reported with its line number.
    """
    with open(path, "rb") as stream:
        return parse_edge_list(stream)


def read_vertex_list(path):
    with open(path, "rb") as stream:
        return parse_vertex_list(stream)


def read_community_list(path):
    with open(path, "rb") as stream:
        return parse_community_list(stream)


def write_edge_list(g, stream, idmap=None):
    """
    Serialize `g` as 'u v' lines (u < v internally), using external ids
    when an IdMap is supplied. Isolated vertices are not representable.
    """
    for u, v in g.edges():
        if idmap is not None:
            u, v = idmap.to_external(u), idmap.to_external(v)
        stream.write(f"{u} {v}\n")


def write_vertex_list(vertices, stream, idmap=None):
    for v in vertices:
        stream.write(f"{idmap.to_external(v) if idmap else v}\n")


def bfs_neighborhood(g, v, t):
    """
    Vertices reachable from `v` within `t` edges, `v` included.

    Args:
        g (Graph): The graph.
        v (int): Start vertex.
        t (int): Depth, at least 1.

    Returns:
        VertexSet: N(v).
    """
    if not 0 <= v < g.n:
        raise ArgumentError(f"vertex {v} out of range for n={g.n}")
    if t < 1:
        raise ArgumentError("BFS depth must be at least 1")
    seen = {int(v)}
    frontier = deque([(int(v), 0)])
    indptr, indices = g.indptr, g.indices
    while frontier:
        u, depth = frontier.popleft()
        if depth == t:
            continue
        for w in indices[indptr[u]:indptr[u + 1]].tolist():
            if w not in seen:
                seen.add(w)
                frontier.append((w, depth + 1))
    return VertexSet.of(seen)


def induced_subgraph(g, s):
    """
    Subgraph of `g` induced by the vertex set `s`.

    Local ids follow the ascending order of `s`, so the returned IdMap maps
    parent ids (external side) to local ids (internal side).

    Returns:
        tuple: (Graph, IdMap)
    """
    if not isinstance(s, VertexSet):
        s = VertexSet.of(s)
    s._check_range(g.n)
    members = s.as_array()
    k = len(members)
    if k == 0:
        return Graph.empty(0), IdMap.from_external(())
    src, dst = [], []
    for local, parent in enumerate(members.tolist()):
        nbrs = g.neighbors(parent)
        pos = np.searchsorted(members, nbrs)
        pos_clipped = np.minimum(pos, k - 1)
        hit = members[pos_clipped] == nbrs
        dst.append(pos_clipped[hit])
        src.append(np.full(int(hit.sum()), local, dtype=np.int64))
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    counts = np.bincount(src, minlength=k)
    indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(indptr, dst), IdMap.from_external(members.tolist())


def connected_components(g):
    """
    Maximal connected vertex sets, largest first; equal sizes are ordered
    by their smallest member id.

    Returns:
        list[VertexSet]
    """
    if g.n == 0:
        return []
    count, labels = csgraph.connected_components(
        g.adjacency_matrix(), directed=False)
    groups = [[] for _ in range(count)]
    for v, label in enumerate(labels.tolist()):
        groups[label].append(v)
    components = [VertexSet.of(group) for group in groups]
    components.sort(key=lambda c: (-len(c), c.members[0]))
    return components


def is_connected(g) -> bool:
    """True for graphs with exactly one component (the empty graph is not)."""
    return g.n > 0 and len(connected_components(g)) == 1

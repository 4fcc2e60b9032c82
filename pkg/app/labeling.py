"""
labeling.py

Vertex labels: the graphlet vector of the subgraph induced by each
vertex's depth-t BFS neighborhood. Covers single-vertex labeling,
parallel labeling of a whole graph, and the binary index file.
"""
import logging
import os
import struct
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from app.errors import ArgumentError, IndexFormatError, StaleIndexWarning
from app.graph import bfs_neighborhood, induced_subgraph
from app.graphlets import (GRAPHLET_SIZES, EXPECTED_DIMENSION,
                           GraphletVector, graphlet_vector)
from app.time_utils import Stopwatch

logger = logging.getLogger(__name__)

MAGIC = b"GMIX"
FORMAT_VERSION = 1
FINGERPRINT_SIZE = 32
# magic, version, l, t, n, dimension
HEADER = struct.Struct("<4sIIIQI")


@dataclass(frozen=True)
class LabelParams:
    """
    Attributes:
        t (int): BFS depth of the labeled neighborhood.
        l (int): Graphlet size.
    """

    t: int = 2
    l: int = 4

    def __post_init__(self):
        if self.t < 1:
            raise ArgumentError("BFS depth t must be at least 1")
        if self.l not in GRAPHLET_SIZES:
            raise ArgumentError(
                f"graphlet size l must be one of {GRAPHLET_SIZES}")

    @property
    def dimension(self) -> int:
        return EXPECTED_DIMENSION[self.l]


class LabelSet:
    """
    Labels of every vertex of one graph.

    Attributes:
        params (LabelParams): Parameters the labels were computed with.
        labels (np.ndarray): n x dimension float64 matrix, row v = f_v.
        fingerprint (bytes): `Graph.fingerprint()` of the labeled graph.
    """

    def __init__(self, params, labels, fingerprint):
        labels = np.ascontiguousarray(labels, dtype=np.float64)
        if labels.ndim != 2 or labels.shape[1] != params.dimension:
            raise ArgumentError(
                f"label matrix shape {labels.shape} does not fit l={params.l}")
        labels.setflags(write=False)
        self.params = params
        self.labels = labels
        self.fingerprint = bytes(fingerprint)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def dimension(self) -> int:
        return self.labels.shape[1]

    def label(self, v) -> GraphletVector:
        return GraphletVector(self.params.l, self.labels[v])

    def matches(self, graph) -> bool:
        """True when these labels were computed for `graph`."""
        return self.fingerprint == graph.fingerprint()

    def to_bytes(self) -> bytes:
        """Serialized index file contents."""
        header = HEADER.pack(MAGIC, FORMAT_VERSION, self.params.l,
                             self.params.t, self.n, self.dimension)
        return (header + self.fingerprint
                + self.labels.astype("<f8").tobytes())

    def __eq__(self, other):
        if not isinstance(other, LabelSet):
            return NotImplemented
        return (self.params == other.params
                and self.fingerprint == other.fingerprint
                and np.array_equal(self.labels, other.labels))

    def __repr__(self):
        return (f"LabelSet(n={self.n}, l={self.params.l}, "
                f"t={self.params.t})")


def _label_row(g, v, p):
    if not 0 <= v < g.n:
        raise ArgumentError(f"vertex {v} out of range for n={g.n}")
    hood, _ = induced_subgraph(g, bfs_neighborhood(g, v, p.t))
    return graphlet_vector(hood, p.l).values


def vertex_label(g, v, p) -> GraphletVector:
    """
    Label f_v of vertex `v`.

    Args:
        g (Graph): Target or query graph.
        v (int): Vertex id.
        p (LabelParams): Depth and graphlet size.
    """
    return GraphletVector(p.l, _label_row(g, v, p))


_worker_state = {}


def _init_worker(g, p):
    _worker_state["graph"] = g
    _worker_state["params"] = p


def _label_block(bounds):
    g, p = _worker_state["graph"], _worker_state["params"]
    start, stop = bounds
    block = np.zeros((stop - start, p.dimension), dtype=np.float64)
    for row, v in enumerate(range(start, stop)):
        block[row] = _label_row(g, v, p)
    return start, block


def _blocks(n, workers):
    size = max(1, -(-n // (workers * 4)))
    return [(start, min(n, start + size)) for start in range(0, n, size)]


def label_all(g, p, workers=1) -> LabelSet:
    """
    Label every vertex of `g`.

    Vertices are split into contiguous blocks labeled by a process pool;
    the result does not depend on the worker count.

    Args:
        g (Graph): Graph to label.
        p (LabelParams): Label parameters.
        workers (int): Number of worker processes (1 labels in-process).
    """
    if workers < 1:
        raise ArgumentError("worker count must be positive")
    labels = np.zeros((g.n, p.dimension), dtype=np.float64)
    with Stopwatch() as watch:
        if workers == 1 or g.n < 2:
            _init_worker(g, p)
            for bounds in _blocks(g.n, 1):
                start, block = _label_block(bounds)
                labels[start:start + len(block)] = block
        else:
            with ProcessPoolExecutor(max_workers=workers,
                                     initializer=_init_worker,
                                     initargs=(g, p)) as pool:
                for start, block in pool.map(_label_block,
                                             _blocks(g.n, workers)):
                    labels[start:start + len(block)] = block
    logger.info("labeled %d vertices (l=%d, t=%d, workers=%d) in %.3fs",
                g.n, p.l, p.t, workers, watch.elapsed)
    return LabelSet(p, labels, g.fingerprint())


def save_index(ls, path):
    """
    Write the labels to `path`: little-endian header (magic "GMIX",
    version, l, t, n, dimension), 32-byte graph fingerprint, then the
    n x dimension float64 labels. The k-d tree is not stored.
    """
    with open(path, "wb") as stream:
        stream.write(ls.to_bytes())


def _read_exact(stream, size, what):
    data = stream.read(size)
    if len(data) != size:
        raise IndexFormatError(f"index file truncated in {what}")
    return data


def load_index(path, graph=None) -> LabelSet:
    """
    Read a file written by `save_index`.

    Args:
        path (str): Index file.
        graph (Graph): When given, its fingerprint is compared with the
            stored one and a StaleIndexWarning is issued on mismatch.

    Raises:
        IndexFormatError: Wrong magic or version, missing fingerprint,
            inconsistent header, or a file size that disagrees with the
            header.
    """
    with open(path, "rb") as stream:
        header = _read_exact(stream, HEADER.size, "header")
        magic, version, l, t, n, dimension = HEADER.unpack(header)
        if magic != MAGIC:
            raise IndexFormatError(f"not an index file (magic {magic!r})")
        if version != FORMAT_VERSION:
            raise IndexFormatError(f"unsupported index version {version}")
        try:
            params = LabelParams(t=t, l=l)
        except ArgumentError as e:
            raise IndexFormatError(
                f"invalid parameters in header: {e}") from e
        if dimension != params.dimension:
            raise IndexFormatError(
                f"dimension {dimension} does not match l={l}")
        fingerprint = _read_exact(stream, FINGERPRINT_SIZE, "fingerprint")
        if not any(fingerprint):
            raise IndexFormatError("index file has no graph fingerprint")
        expected = HEADER.size + FINGERPRINT_SIZE + 8 * n * dimension
        actual = os.fstat(stream.fileno()).st_size
        if actual < expected:
            raise IndexFormatError(
                f"index file truncated in labels: header promises {n} "
                f"vertices, {actual} of {expected} bytes present")
        if actual > expected:
            raise IndexFormatError("trailing data after labels")
        body = _read_exact(stream, 8 * n * dimension, "labels")
    labels = np.frombuffer(body, dtype="<f8").astype(np.float64)
    ls = LabelSet(params, labels.reshape(n, dimension), fingerprint)
    if graph is not None:
        check_fingerprint(ls, graph)
    return ls


def check_fingerprint(ls, graph) -> bool:
    """
    Warn (StaleIndexWarning) when `ls` was built for another graph.

    Returns:
        bool: True when the fingerprints agree.
    """
    if ls.matches(graph):
        return True
    message = ("index fingerprint does not match the target graph; "
               "labels may be stale")
    logger.warning(message)
    warnings.warn(message, StaleIndexWarning, stacklevel=2)
    return False

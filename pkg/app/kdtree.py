"""
kdtree.py

Exact k-nearest-neighbor search over vertex labels.

Nodes split on the coordinate of largest spread at the median point;
subsets of at most LEAF_SIZE points, or with no spread left, are scanned
directly. Distance ties are resolved toward the smaller vertex id.
"""
import heapq
import logging

import numpy as np

from app.errors import ArgumentError

logger = logging.getLogger(__name__)

LEAF_SIZE = 16


def squared_distances(points, q):
    """Squared Euclidean distance from `q` to every row of `points`."""
    diff = points - q
    return np.einsum("ij,ij->i", diff, diff)


class _Node:
    __slots__ = ("axis", "split", "left", "right", "ids")

    def __init__(self, axis=-1, split=0.0, left=None, right=None, ids=None):
        self.axis = axis
        self.split = split
        self.left = left
        self.right = right
        self.ids = ids


class KdIndex:
    """
    k-d tree over the rows of a label matrix; row i is vertex i.

    The tree is immutable once built and may be queried concurrently.
    """

    def __init__(self, points):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2:
            raise ArgumentError("index points must form a 2-d array")
        self.points = points
        self.points.setflags(write=False)
        ids = np.arange(len(points), dtype=np.int64)
        self.root = self._build(ids) if len(points) else None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def _build(self, ids):
        block = self.points[ids]
        spread = block.max(axis=0) - block.min(axis=0)
        axis = int(np.argmax(spread))
        if len(ids) <= LEAF_SIZE or spread[axis] == 0.0:
            return _Node(ids=ids)
        order = np.argsort(block[:, axis], kind="stable")
        mid = len(ids) // 2
        left_ids, right_ids = ids[order[:mid]], ids[order[mid:]]
        split = float(self.points[right_ids[0], axis])
        return _Node(axis, split, self._build(left_ids),
                     self._build(right_ids))

    def query(self, q, k):
        """
        The `k` points nearest to `q`.

        Returns:
            list[tuple]: (vertex id, distance) ascending by distance, then id.
        """
        q = _as_query(q, self.dimension)
        if k < 1:
            raise ArgumentError("k must be at least 1")
        if k >= self.n:
            return brute_force_knn(self.points, q, k)
        best = []  # max-heap of (-d2, -id)
        self._search(self.root, q, k, best)
        found = sorted((-neg_d2, -neg_id) for neg_d2, neg_id in best)
        return [(int(v), float(np.sqrt(d2))) for d2, v in found]

    def _search(self, node, q, k, best):
        if node.ids is not None:
            d2 = squared_distances(self.points[node.ids], q)
            for vertex, dist in zip(node.ids.tolist(), d2.tolist()):
                entry = (-dist, -vertex)
                if len(best) < k:
                    heapq.heappush(best, entry)
                elif entry > best[0]:
                    heapq.heapreplace(best, entry)
            return
        diff = q[node.axis] - node.split
        near, far = (node.left, node.right) if diff < 0 \
            else (node.right, node.left)
        self._search(near, q, k, best)
        if len(best) < k or diff * diff <= -best[0][0]:
            self._search(far, q, k, best)


def _as_query(q, dimension):
    values = getattr(q, "values", q)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (dimension,):
        raise ArgumentError(
            f"query of dimension {values.shape} against index of "
            f"dimension {dimension}")
    return values


def brute_force_knn(points, q, k):
    """Linear scan with the same ordering contract as `KdIndex.query`."""
    q = _as_query(q, points.shape[1])
    d2 = squared_distances(points, q)
    order = np.lexsort((np.arange(len(d2)), d2))[:k]
    return [(int(v), float(np.sqrt(d2[v]))) for v in order]


def build_index(label_set) -> KdIndex:
    """Build the k-NN index over the labels of a LabelSet."""
    index = KdIndex(label_set.labels)
    logger.info("built k-d tree over %d labels of dimension %d",
                index.n, index.dimension)
    return index


def knn(index, q, k):
    """Exact k nearest labels to `q`; see `KdIndex.query`."""
    return index.query(q, k)

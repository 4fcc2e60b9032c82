"""
matching.py

Exact maximum-weight bipartite matching on sparse, rectangular instances.

Missing edges enter the assignment problem with weight zero and are
discarded from the answer. Since every real weight is non-negative, the
optimal assignment and the optimal matching have the same total weight.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.errors import ArgumentError


@dataclass(frozen=True)
class BipartiteInstance:
    """
    Attributes:
        left (tuple): Left vertex ids.
        right (tuple): Right vertex ids.
        edges (tuple): (left id, right id, weight) triples.
    """

    left: tuple
    right: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(sorted(set(self.left))))
        object.__setattr__(self, "right", tuple(sorted(set(self.right))))
        object.__setattr__(self, "edges", tuple(
            (a, b, float(w)) for a, b, w in self.edges))
        left, right = set(self.left), set(self.right)
        seen = set()
        for a, b, w in self.edges:
            if a not in left or b not in right:
                raise ArgumentError(f"edge ({a}, {b}) leaves the instance")
            if (a, b) in seen:
                raise ArgumentError(f"duplicate edge ({a}, {b})")
            if not math.isfinite(w) or w < 0:
                raise ArgumentError(
                    f"edge ({a}, {b}) has invalid weight {w}")
            seen.add((a, b))


@dataclass(frozen=True)
class Matching:
    """
    One-to-one set of (left, right) pairs and their total weight.
    """

    pairs: tuple = ()
    weight: float = 0.0

    def __post_init__(self):
        lefts = [a for a, _ in self.pairs]
        rights = [b for _, b in self.pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ArgumentError("matching is not one-to-one")

    def __len__(self):
        return len(self.pairs)

    def as_dict(self):
        return dict(self.pairs)


def max_weight_bipartite_matching(inst) -> Matching:
    """
    Optimal (not necessarily perfect) matching of `inst`.

    Returns:
        Matching: Pairs sorted by left id.
    """
    if not inst.edges:
        return Matching()
    row = {v: i for i, v in enumerate(inst.left)}
    col = {w: j for j, w in enumerate(inst.right)}
    weights = np.zeros((len(inst.left), len(inst.right)), dtype=np.float64)
    present = np.zeros(weights.shape, dtype=bool)
    for a, b, w in inst.edges:
        weights[row[a], col[b]] = w
        present[row[a], col[b]] = True
    rows, cols = linear_sum_assignment(weights, maximize=True)
    pairs = []
    total = 0.0
    for i, j in zip(rows.tolist(), cols.tolist()):
        if present[i, j]:
            pairs.append((inst.left[i], inst.right[j]))
            total += weights[i, j]
    return Matching(tuple(sorted(pairs)), total)

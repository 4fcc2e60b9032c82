"""
entity/match_result.py

Defines the MatchResult "entity" model, the final answer of one query:
which query vertex went to which target vertex, and how similar the
matched target subgraph is to the query.
"""


class MatchResult:
    def __init__(
        self,
        mapping=None,
        target_set=(),
        score=0.0,
        n_query=0,
        candidates=0,
        seed=0,
        grown=0,
        completed=0
    ):
        """
        Represents the outcome of the four matching phases.

        Attributes:
            mapping (dict): Query vertex id -> target vertex id.
            target_set (tuple): Sorted matched target ids, V*.
            score (float): Graphlet kernel K(Q, G*) in [0, 1].
            n_query (int): Number of query vertices.
            candidates (int): |R|, size of the selected candidate set.
            seed (int): |S_G|, size of the seed match.
            grown (int): Pairs matched by the growing phase.
            completed (int): Pairs added by the completion phase.
        """
        self.mapping = dict(sorted((mapping or {}).items()))
        self.target_set = tuple(target_set)
        self.score = score
        self.n_query = n_query
        self.candidates = candidates
        self.seed = seed
        self.grown = grown
        self.completed = completed

    @property
    def matched(self):
        return len(self.mapping)

    def unmatched_queries(self):
        """Query ids left without a partner, ascending."""
        return [v for v in range(self.n_query) if v not in self.mapping]

    def to_dict(self):
        """
        Serialize this MatchResult to a JSON-serializable dict.

        Returns:
        --------
        dict
            'mapping' as [query, target] pairs, 'target_set', 'score',
            'matched', 'of', and the per-phase counters under 'phases'.
        """
        return {
            'mapping': [[q, t] for q, t in self.mapping.items()],
            'target_set': list(self.target_set),
            'score': self.score,
            'matched': self.matched,
            'of': self.n_query,
            'phases': {
                'candidates': self.candidates,
                'seed': self.seed,
                'grown': self.grown,
                'completed': self.completed,
            },
        }

    def __eq__(self, other):
        if not isinstance(other, MatchResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return (f"MatchResult(matched={self.matched}/{self.n_query}, "
                f"score={self.score:.6f})")

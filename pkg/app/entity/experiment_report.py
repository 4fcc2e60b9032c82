"""
entity/experiment_report.py

Defines the ExperimentReport "entity" model, one benchmark query outcome
as printed by `bench` and stored in the Reports table.
"""

FIELDS = (
    'query_index', 'n_q', 'matched', 'score', 'baseline_score',
    'exact_match', 'in_pruned', 'density', 'delta', 'tau',
)


class ExperimentReport:
    def __init__(
        self,
        query_index=0,
        n_q=0,
        matched=0,
        score=0.0,
        baseline_score=None,
        exact_match=False,
        in_pruned=False,
        density=None,
        delta=0.0,
        tau=0.0,
        report_id=None,
        run_id=None
    ):
        """
        Represents a single query of a benchmark suite.

        Attributes:
            query_index (int): Position of the query in its suite.
            n_q (int): Query vertex count.
            matched (int): |V*|, number of matched target vertices.
            score (float): K(Q, G*) of the match.
            baseline_score (float): K(Q, random connected subgraph of the
                same size), or None when no baseline was drawn.
            exact_match (bool): V* equals the planted vertex set.
            in_pruned (bool): The planted vertex set lies inside R.
            density (float): Density of G*, or None when not requested.
            delta (float): Seconds spent labeling the query.
            tau (float): Seconds of the whole matching phase (delta
                included).
            report_id (int): Row id once stored.
            run_id (int): Owning run once stored.
        """
        self.query_index = query_index
        self.n_q = n_q
        self.matched = matched
        self.score = score
        self.baseline_score = baseline_score
        self.exact_match = exact_match
        self.in_pruned = in_pruned
        self.density = density
        self.delta = delta
        self.tau = tau
        self.report_id = report_id
        self.run_id = run_id

    @staticmethod
    def from_row(row):
        """
        Construct an ExperimentReport from a database row.

        Parameters:
        -----------
        row : dict
            A dict-like row of the Reports table.

        Returns:
        --------
        ExperimentReport
        """
        return ExperimentReport(
            query_index=row['query_index'],
            n_q=row['n_q'],
            matched=row['matched'],
            score=row['score'],
            baseline_score=row['baseline_score'],
            exact_match=bool(row['exact_match']),
            in_pruned=bool(row['in_pruned']),
            density=row['density'],
            delta=row['delta'],
            tau=row['tau'],
            report_id=row['report_id'],
            run_id=row['run_id'],
        )

    def to_dict(self, timings=True):
        """
        Serialize this report to a JSON-serializable dict.

        Args:
            timings (bool): Include 'delta' and 'tau'.
        """
        data = {name: getattr(self, name) for name in FIELDS}
        if not timings:
            del data['delta']
            del data['tau']
        return data

    def to_line(self, timings=True):
        """
        Render as one 'key=value' line; floats with six decimals,
        missing values as 'na'.
        """
        return render_fields(self.to_dict(timings))

    def __repr__(self):
        return f"ExperimentReport({self.to_line()})"


def render_fields(data):
    """
    Join a dict into 'key=value' pairs: floats with six decimals, booleans
    as 0/1, None as 'na'.
    """
    parts = []
    for key, value in data.items():
        if value is None:
            value = 'na'
        elif isinstance(value, bool):
            value = int(value)
        elif isinstance(value, float):
            value = f'{value:.6f}'
        parts.append(f'{key}={value}')
    return ' '.join(parts)

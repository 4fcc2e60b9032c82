import logging

from app.errors import (ArgumentError, DisconnectedQueryError,
                        GraphSearchError, ParamsMismatchError)
from app.graph import Graph, IdMap, read_edge_list
from app.graphlets import get_catalog
from app.labeling import load_index
from app.matcher import MatchParams
from app.pipeline import RunConfig, SearchIndex, run_query, score_vertex_set

logger = logging.getLogger(__name__)


def graph_from_pairs(pairs):
    """
    Build a graph from [[a, b], ...] with arbitrary integer ids.

    Returns:
        tuple: (Graph, IdMap)
    """
    try:
        pairs = [(int(a), int(b)) for a, b in pairs]
    except (TypeError, ValueError):
        raise ArgumentError("edges must be pairs of integers") from None
    idmap = IdMap.from_external(sorted({x for pair in pairs for x in pair}))
    edges = [(idmap.forward[a], idmap.forward[b]) for a, b in pairs]
    return Graph.from_edges(len(idmap), edges), idmap


class SearchService:
    """
    Holds one preprocessed target graph and answers queries against it
    for the HTTP API. Failures are reported as status constants.
    """

    INDEX_NOT_LOADED = 'index_not_loaded'
    INVALID_QUERY = 'invalid_query'
    DISCONNECTED_QUERY = 'disconnected_query'
    PARAMS_MISMATCH = 'params_mismatch'
    UNKNOWN_ERROR = 'unknown_error'
    OK = 'ok'

    def __init__(self, index=None):
        """
        Args:
            index (SearchIndex): Preprocessed target, or None until
                `load` is called.
        """
        self.index = index

    def load(self, graph_path, index_path):
        """
        Load the target edge list and its index file.

        Returns:
            str: OK, or UNKNOWN_ERROR when either file cannot be read.
        """
        try:
            graph, idmap = read_edge_list(graph_path)
            labels = load_index(index_path)
            self.index = SearchIndex.from_labels(graph, labels, idmap)
            logger.info("service loaded %s (n=%d, m=%d)",
                        graph_path, graph.n, graph.m)
            return SearchService.OK
        except (OSError, GraphSearchError) as e:
            logger.error("could not load target: %s", e)
            return SearchService.UNKNOWN_ERROR

    def info(self):
        """
        Describe the loaded index.

        Returns:
            dict or str: Index summary, or INDEX_NOT_LOADED.
        """
        if self.index is None:
            return SearchService.INDEX_NOT_LOADED
        params = self.index.params
        return {
            'n': self.index.graph.n,
            'm': self.index.graph.m,
            'graphlet_size': params.l,
            'depth': params.t,
            'dimension': self.index.labels.dimension,
            'classes': list(get_catalog(params.l).names()),
        }

    def query(self, edges, k=10, alpha=0.3, h1=0.4, h2=0.95):
        """
        Match a query graph given by its edge pairs.

        Returns:
            dict or str: Mapping (external ids), score and timings, or a
            status constant.
        """
        if self.index is None:
            return SearchService.INDEX_NOT_LOADED
        try:
            q, q_ids = graph_from_pairs(edges)
            cfg = RunConfig(self.index.params,
                            MatchParams(k=k, alpha=alpha, h1=h1, h2=h2))
            outcome = run_query(self.index, q, cfg)
        except DisconnectedQueryError:
            return SearchService.DISCONNECTED_QUERY
        except ParamsMismatchError:
            return SearchService.PARAMS_MISMATCH
        except ArgumentError as e:
            logger.warning("rejected query: %s", e)
            return SearchService.INVALID_QUERY
        except Exception as e:
            logger.error("query failed: %s", e)
            return SearchService.UNKNOWN_ERROR

        result, report = outcome.result, outcome.report
        target_ids = self.index.idmap
        return {
            'mapping': [[q_ids.to_external(v), target_ids.to_external(w)]
                        for v, w in result.mapping.items()],
            'score': result.score,
            'matched': result.matched,
            'of': result.n_query,
            'delta': report.delta,
            'tau': report.tau,
        }

    def score(self, edges, vertices):
        """
        K(Q, induced target subgraph on `vertices` (external ids)).

        Returns:
            float or str: The kernel value, or a status constant.
        """
        if self.index is None:
            return SearchService.INDEX_NOT_LOADED
        try:
            q, _ = graph_from_pairs(edges)
            internal = [self.index.idmap.to_internal(v) for v in vertices]
            return score_vertex_set(q, self.index.graph, internal,
                                    self.index.params.l)
        except ArgumentError:
            return SearchService.INVALID_QUERY
        except Exception as e:
            logger.error("scoring failed: %s", e)
            return SearchService.UNKNOWN_ERROR

from flask import Flask, request, jsonify

from app.config import get_service_paths
from app.service import SearchService


api = Flask(__name__)
search_service = SearchService()

STATUS_CODES = {
    SearchService.INDEX_NOT_LOADED: 503,
    SearchService.INVALID_QUERY: 400,
    SearchService.DISCONNECTED_QUERY: 422,
    SearchService.PARAMS_MISMATCH: 409,
    SearchService.UNKNOWN_ERROR: 500,
}


def load_from_environment():
    """
    Load the target named by GRAPHLET_GRAPH / GRAPHLET_INDEX, if both
    are set.
    """
    graph_path, index_path = get_service_paths()
    if graph_path and index_path:
        return search_service.load(graph_path, index_path)
    return SearchService.INDEX_NOT_LOADED


def _error(result):
    return jsonify({"error": result}), STATUS_CODES.get(result, 500)


@api.route("/index", methods=["GET"])
def get_index():
    """
    Describes the loaded target index:
    vertex and edge counts, graphlet size, depth, label dimension and the
    graphlet class names in label order.
    """

    try:
        result = search_service.info()

        if isinstance(result, str):
            return _error(result)

        return jsonify(result), 200
    except Exception as e:
        return jsonify({"error": str(e)}), 500


@api.route("/query", methods=["POST"])
def query():
    """
    Searches the target for the subgraph most similar to a query graph.

    Request Body:
    {
        "edges": [[0, 1], [1, 2]],
        "k": 10, "alpha": 0.3, "h1": 0.4, "h2": 0.95
    }

    Response Format:
    {
        "mapping": [[query_id, target_id], ...],
        "score": 0.97, "matched": 3, "of": 3,
        "delta": 0.01, "tau": 0.02
    }
    """

    try:
        data = request.json or {}
        edges = data.get("edges")

        if not edges:
            return _error(SearchService.INVALID_QUERY)

        result = search_service.query(
            edges=edges,
            k=int(data.get("k", 10)),
            alpha=float(data.get("alpha", 0.3)),
            h1=float(data.get("h1", 0.4)),
            h2=float(data.get("h2", 0.95)),
        )

        if result is None or isinstance(result, str):
            return _error(result or SearchService.UNKNOWN_ERROR)

        return jsonify(result), 200
    except (TypeError, ValueError):
        return _error(SearchService.INVALID_QUERY)
    except Exception as e:
        return jsonify({"error": str(e)}), 500


@api.route("/score", methods=["POST"])
def score():
    """
    Computes the graphlet kernel between a query graph and the target
    subgraph induced by a list of target vertex ids.

    Request Body:
    {
        "edges": [[0, 1], [1, 2]],
        "vertices": [10, 11, 12]
    }
    """

    try:
        data = request.json or {}
        edges = data.get("edges")
        vertices = data.get("vertices")

        if not edges or not vertices:
            return _error(SearchService.INVALID_QUERY)

        result = search_service.score(edges=edges, vertices=vertices)

        if result is None or isinstance(result, str):
            return _error(result or SearchService.UNKNOWN_ERROR)

        return jsonify({"score": result}), 200
    except Exception as e:
        return jsonify({"error": str(e)}), 500

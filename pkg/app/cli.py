"""
cli.py

Command-line surface: preprocess a target, query it, score a vertex set,
generate and perturb graphs, and run benchmark suites.
"""
import argparse
import contextlib
import logging
import secrets
import sys

from app import __version__
from app.config import (configure_logging, get_report_db_path,
                        get_service_address, get_workers)
from app.entity.experiment_report import render_fields
from app.errors import (ArgumentError, DisconnectedQueryError,
                        IndexFormatError, ParamsMismatchError, ParseError)
from app.generators import (community_graph, gnp, random_connected_subgraph,
                            remove_edges)
from app.graph import (read_community_list, read_edge_list, read_vertex_list,
                       write_edge_list, write_vertex_list)
from app.labeling import LabelParams, label_all, load_index, save_index
from app.matcher import MatchParams
from app.pipeline import (SUITES, BenchGroup, PlantedQuery, RunConfig,
                          SearchIndex, SuiteSummary, communities_to_queries,
                          run_benchmark, run_experiment_suite, run_query,
                          score_vertex_set)
from app.report_store import ReportStore
from app.time_utils import Stopwatch

logger = logging.getLogger(__name__)


class ExitCode:
    OK = 0
    USAGE = 2
    IO = 3
    PARAMS_MISMATCH = 4
    DISCONNECTED_QUERY = 5


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as stream:
            yield stream


def _resolve_seed(seed):
    """Use `seed`, or draw one and print it so the run can be repeated."""
    if seed is None:
        seed = secrets.randbits(64)
        print(f"# seed={seed}", file=sys.stderr)
    return seed


def _match_params(args):
    return MatchParams(k=args.k, alpha=args.alpha, h1=args.h1, h2=args.h2)


def _params_line(label, match):
    return render_fields({
        'l': label.l, 't': label.t, 'k': match.k, 'alpha': match.alpha,
        'h1': match.h1, 'h2': match.h2,
    })


def _load_search_index(graph_path, index_path):
    graph, idmap = read_edge_list(graph_path)
    labels = load_index(index_path)
    return SearchIndex.from_labels(graph, labels, idmap)


def cmd_preprocess(args):
    graph, _ = read_edge_list(args.graph)
    params = LabelParams(t=args.depth, l=args.graphlet_size)
    with Stopwatch() as watch:
        labels = label_all(graph, params, args.threads)
        save_index(labels, args.out)
    print(f"n={graph.n} m={graph.m} dimension={labels.dimension} "
          f"elapsed={watch.elapsed:.3f}s")
    return ExitCode.OK


def cmd_query(args):
    index = _load_search_index(args.graph, args.index)
    label = index.params
    requested = LabelParams(
        t=args.depth if args.depth is not None else label.t,
        l=args.graphlet_size if args.graphlet_size is not None else label.l)
    query, query_ids = read_edge_list(args.query)
    match = _match_params(args)
    cfg = RunConfig(requested, match, args.threads)
    outcome = run_query(index, query, cfg)
    result, report = outcome.result, outcome.report

    with _output(args.output) as out:
        out.write(f"# graphlet-search {__version__}\n")
        out.write(f"# {_params_line(label, match)}\n")
        for v, w in result.mapping.items():
            out.write(f"{query_ids.to_external(v)}\t"
                      f"{index.idmap.to_external(w)}\n")
        unmatched = result.unmatched_queries()
        if unmatched:
            out.write("# unmatched=" + " ".join(
                str(query_ids.to_external(v)) for v in unmatched) + "\n")
        summary = {'score': result.score, 'matched': result.matched,
                   'of': result.n_query}
        if not args.no_timings:
            summary['delta'] = report.delta
            summary['tau'] = report.tau
        out.write(f"# {render_fields(summary)}\n")
    return ExitCode.OK


def cmd_score(args):
    graph, idmap = read_edge_list(args.graph)
    query, _ = read_edge_list(args.query)
    vertices = read_vertex_list(args.vertices)
    if not vertices:
        raise ArgumentError("vertex list is empty")
    internal = [idmap.to_internal(v) for v in vertices]
    value = score_vertex_set(query, graph, internal, args.graphlet_size)
    print(f"{value:.6f}")
    return ExitCode.OK


def cmd_gen(args):
    seed = _resolve_seed(args.seed)
    communities = None
    if args.model == "gnp":
        if args.n is None:
            raise ArgumentError("gnp needs --n")
        graph = gnp(args.n, args.p, seed)
    else:
        if not args.sizes:
            raise ArgumentError("communities needs --sizes")
        graph, communities = community_graph(args.sizes, args.p_in,
                                             args.p_out, seed)
    with _output(args.output) as out:
        write_edge_list(graph, out)
    if communities is not None and args.communities_out:
        with open(args.communities_out, "w", encoding="utf-8") as out:
            for members in communities:
                out.write(" ".join(str(v) for v in members) + "\n")
    return ExitCode.OK


def cmd_perturb(args):
    seed = _resolve_seed(args.seed)
    graph, idmap = read_edge_list(args.graph)
    perturbed = remove_edges(graph, args.remove_frac, seed)
    with _output(args.output) as out:
        write_edge_list(perturbed, out, idmap)
    return ExitCode.OK


def cmd_extract(args):
    seed = _resolve_seed(args.seed)
    graph, idmap = read_edge_list(args.graph)
    vertices = random_connected_subgraph(graph, args.size, seed)
    with _output(args.output) as out:
        write_vertex_list(vertices, out, idmap)
    return ExitCode.OK


def _community_groups(args, cfg):
    if args.graph is None:
        raise ArgumentError("--communities needs --graph")
    graph, idmap = read_edge_list(args.graph)
    communities = read_community_list(args.communities)
    if args.repeats is not None:
        communities = communities[:args.repeats]
    index = SearchIndex.build(graph, cfg.label, cfg.workers, idmap)
    if args.query_graph:
        source, source_ids = read_edge_list(args.query_graph)
        queries = [PlantedQuery(q.graph) for q in
                   communities_to_queries(source, communities, source_ids)]
    else:
        queries = communities_to_queries(graph, communities, idmap)
    logger.info("%d of %d communities usable as queries",
                len(queries), len(communities))
    reports, summary = run_experiment_suite(index, queries, cfg)
    return [BenchGroup("communities", reports, summary)]


def _store_groups(path, suite, cfg, groups, timings):
    params = {'l': cfg.label.l, 't': cfg.label.t, 'k': cfg.match.k,
              'alpha': cfg.match.alpha, 'h1': cfg.match.h1,
              'h2': cfg.match.h2}
    with ReportStore.at(path) as store:
        for group in groups:
            run_id = store.save_run(f"{suite}:{group.name}"
                                    if group.name != suite else suite,
                                    cfg.seed, params)
            if run_id == ReportStore.UNKNOWN_ERROR:
                raise OSError(f"could not write reports to {path}")
            for report in group.reports:
                store.save_report(run_id, report)
            if store.update_summary(
                    run_id, group.summary.to_dict(timings)) != ReportStore.OK:
                raise OSError(f"could not write the summary to {path}")
            logger.info("stored run %s with %d reports", run_id,
                        len(group.reports))


def cmd_bench(args):
    seed = _resolve_seed(args.seed)
    label = LabelParams(t=args.depth, l=args.graphlet_size)
    cfg = RunConfig(label, _match_params(args), args.threads, seed)
    timings = not args.no_timings

    if args.communities:
        suite = "communities"
        groups = _community_groups(args, cfg)
    else:
        suite = args.suite
        repeats = args.repeats if args.repeats is not None else 10
        groups = run_benchmark(suite, repeats, cfg)

    with _output(args.output) as out:
        out.write(f"# graphlet-search {__version__}\n")
        out.write(f"# suite={suite} seed={seed} "
                  f"{_params_line(label, cfg.match)}\n")
        for group in groups:
            for report in group.reports:
                out.write(f"{report.to_line(timings)}\n")
            out.write(f"# group={group.name} "
                      f"{render_fields(group.summary.to_dict(timings))}\n")
        if len(groups) > 1:
            total = SuiteSummary.from_reports(
                [r for group in groups for r in group.reports])
            out.write(f"# group=all "
                      f"{render_fields(total.to_dict(timings))}\n")

    if args.report_db:
        _store_groups(args.report_db, suite, cfg, groups, timings)
    return ExitCode.OK


def cmd_serve(args):
    from app.api import api, load_from_environment, search_service

    host, port = get_service_address()
    if args.graph and args.index:
        status = search_service.load(args.graph, args.index)
    else:
        status = load_from_environment()
    if status != search_service.OK:
        logger.error("no target loaded; pass --graph and --index or set "
                     "GRAPHLET_GRAPH and GRAPHLET_INDEX")
        return ExitCode.IO
    api.run(host=args.host or host, port=args.port or port)
    return ExitCode.OK


def _add_match_arguments(parser):
    defaults = MatchParams()
    parser.add_argument("--k", type=int, default=defaults.k,
                        help="nearest neighbors per query vertex")
    parser.add_argument("--alpha", type=float, default=defaults.alpha)
    parser.add_argument("--h1", type=float, default=defaults.h1,
                        help="similarity threshold of match growing")
    parser.add_argument("--h2", type=float, default=defaults.h2,
                        help="Jaccard threshold of match completion")


def _add_threads_argument(parser):
    parser.add_argument("--threads", type=int, default=get_workers(),
                        help="labeling workers (GRAPHLET_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphlet-search",
        description="Approximate subgraph search under the graphlet kernel.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true",
                        help="log progress at INFO level")
    commands = parser.add_subparsers(dest="command", required=True)
    defaults = LabelParams()

    p = commands.add_parser("preprocess", help="label a target graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=int, default=defaults.t)
    p.add_argument("--graphlet-size", type=int, default=defaults.l)
    _add_threads_argument(p)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_preprocess)

    p = commands.add_parser("query", help="match a query graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--depth", type=int, default=None,
                   help="must equal the depth stored in the index")
    p.add_argument("--graphlet-size", type=int, default=None,
                   help="must equal the graphlet size stored in the index")
    _add_match_arguments(p)
    _add_threads_argument(p)
    p.add_argument("--output")
    p.add_argument("--no-timings", action="store_true",
                   help="omit delta and tau from the summary line")
    p.set_defaults(handler=cmd_query)

    p = commands.add_parser("score",
                            help="kernel of a query and a vertex set")
    p.add_argument("--graph", required=True)
    p.add_argument("--vertices", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--graphlet-size", type=int, default=defaults.l)
    p.set_defaults(handler=cmd_score)

    p = commands.add_parser("gen", help="generate a random graph")
    p.add_argument("model", choices=("gnp", "communities"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--p-in", type=float, default=0.2)
    p.add_argument("--p-out", type=float, default=0.006)
    p.add_argument("--communities-out")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(handler=cmd_gen)

    p = commands.add_parser("perturb", help="remove a fraction of edges")
    p.add_argument("--graph", required=True)
    p.add_argument("--remove-frac", type=float, default=0.05)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(handler=cmd_perturb)

    p = commands.add_parser("extract",
                            help="random connected vertex set")
    p.add_argument("--graph", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(handler=cmd_extract)

    p = commands.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", choices=SUITES, default="planted")
    p.add_argument("--repeats", type=int, default=None,
                   help="queries per suite (default 10)")
    p.add_argument("--seed", type=int)
    p.add_argument("--graph", help="target for --communities")
    p.add_argument("--communities",
                   help="community file whose members become queries")
    p.add_argument("--query-graph",
                   help="cut the communities from this graph instead of "
                        "the --graph target")
    p.add_argument("--depth", type=int, default=defaults.t)
    p.add_argument("--graphlet-size", type=int, default=defaults.l)
    _add_match_arguments(p)
    _add_threads_argument(p)
    p.add_argument("--report-db", nargs="?", const=get_report_db_path(),
                   default=None, help="store the run in this SQLite file")
    p.add_argument("--output")
    p.add_argument("--no-timings", action="store_true",
                   help="omit delta and tau from every line")
    p.set_defaults(handler=cmd_bench)

    p = commands.add_parser("serve", help="run the HTTP query service")
    p.add_argument("--graph", help="defaults to GRAPHLET_GRAPH")
    p.add_argument("--index", help="defaults to GRAPHLET_INDEX")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    """
    Run one command.

    Returns:
        int: 0 on success; 2 on parse and argument errors, 3 on I/O and
        index format errors, 4 when the index was built with other
        parameters, 5 on a disconnected query.
    """
    args = build_parser().parse_args(argv)
    configure_logging("INFO" if args.verbose else None)
    try:
        return args.handler(args)
    except ParseError as e:
        logger.error("parse error: %s", e)
        return ExitCode.USAGE
    except ParamsMismatchError as e:
        logger.error("%s", e)
        return ExitCode.PARAMS_MISMATCH
    except DisconnectedQueryError as e:
        logger.error("%s", e)
        return ExitCode.DISCONNECTED_QUERY
    except ArgumentError as e:
        logger.error("invalid argument: %s", e)
        return ExitCode.USAGE
    except (OSError, IndexFormatError) as e:
        logger.error("I/O error: %s", e)
        return ExitCode.IO


def run():
    sys.exit(main())

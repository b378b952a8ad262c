"""``ctxgraph`` command line.

Exit codes: 0 success, 1 usage error (including query syntax errors),
2 runtime error, 3 query deadline exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from .context import ContextModel, build_metagraph, enrich_graph
from .dictionary import FULL, apply_layout, decode_all, footprint, get_layout
from .errors import CtxGraphError, QuerySyntaxError, TimedOut
from .export import (MANIFEST, dumps, export_json_graph, load_snapshot, metagraph_document,
                     save_snapshot, write_graph_csvs)
from .ingest import bulk_import, discover_csvs
from .query import DEFAULT_HOP_BOUND, LayoutContext, evaluate

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_TIMEOUT = 0, 1, 2, 3
DEADLINE_ENV = "CG_DEADLINE_SECS"
DEFAULT_DEADLINE = 60.0

GRAMMAR = """\
query grammar:
  MATCH pattern ("," pattern)* [WHERE cond (AND cond)*]
      RETURN [DISTINCT] item ("," item)* [ORDER BY item [ASC|DESC] ("," ...)*] [LIMIT n]
  CALL algo "(" key=value ("," key=value)* ")"
  pattern := [pathvar "="] node (edge node)*
  node    := "(" [var] (":" Label)* ["{" key "=" value ("," ...)* "}"] ")"
  edge    := "-[" [var] [":" type ("|" type)*] [props] [bounds] "]->"   (also "<-[...]-", "-[...]-")
           | "-[" [var] ":/" regex "/" [bounds] "]-"
  bounds  := "*" | "*" n | "*" a ".." b
  cond    := expr (= | <> | != | < | > | <= | >= | CONTAINS) expr | expr IS [NOT] NULL
  item    := var | var.key | count(*) | count(var)  [AS alias]
  algo    := pagerank | degree | betweenness | components | louvain | shortest_path
"""

log = logging.getLogger("ctxgraph")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _deadline() -> float:
    raw = os.environ.get(DEADLINE_ENV)
    if not raw:
        return DEFAULT_DEADLINE
    try:
        value = float(raw)
    except ValueError:
        raise _UsageError(f"{DEADLINE_ENV} must be a number of seconds, got {raw!r}") from None
    if value <= 0:
        raise _UsageError(f"{DEADLINE_ENV} must be positive")
    return value


def _load_graph(path, layout_name: str | None):
    """Graph + store + layout from a snapshot directory or a CSV directory."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{path} does not exist")
    if (path / MANIFEST).exists():
        graph, store, layout, _ = load_snapshot(path)
        if layout_name is None or get_layout(layout_name).name == layout.name:
            return graph, store, layout
        if layout.name != FULL.name:
            graph = decode_all(graph, store)
        target = get_layout(layout_name)
        graph, store = apply_layout(graph, target)
        return graph, store, target
    nodes, edges = discover_csvs(path)
    if not nodes:
        raise FileNotFoundError(f"{path} holds neither {MANIFEST} nor nodes*.csv files")
    layout = get_layout(layout_name or "full")
    graph, store, report = bulk_import(nodes, edges, layout)
    log.info("imported %s", report.to_json())
    return graph, store, layout


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctxgraph", description="Context-aware property graph toolkit.",
                epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seed", type=int, default=0, help="seed for generation and Louvain")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    imp = sub.add_parser("import", help="bulk-import CSVs into a snapshot directory")
    imp.add_argument("--nodes", nargs="*", default=[], help="node CSV files")
    imp.add_argument("--edges", nargs="*", default=[], help="edge CSV files")
    imp.add_argument("--dir", help="directory with nodes*.csv / edges*.csv")
    imp.add_argument("--layout", default="full", choices=["full", "poly1", "poly2"])
    imp.add_argument("--out", required=True, help="snapshot directory to write")

    gen = sub.add_parser("generate", help="write a synthetic dataset as CSVs")
    _generate_args(gen)

    q = sub.add_parser("query", help="evaluate a query")
    q.add_argument("--graph", required=True, help="snapshot or CSV directory")
    q.add_argument("--layout", choices=["full", "poly1", "poly2"])
    q.add_argument("--q", required=True, help="query text")
    q.add_argument("--format", default="tsv", choices=["tsv", "json"])
    q.add_argument("--hop-bound", type=int, default=DEFAULT_HOP_BOUND)
    q.add_argument("--allow-disconnected", action="store_true")

    bench = sub.add_parser("bench", help="synthetic data and layout benchmarks")
    bsub = bench.add_subparsers(dest="bench_command", parser_class=_Parser)
    _generate_args(bsub.add_parser("generate", help="write a synthetic dataset"))
    run = bsub.add_parser("run", help="time the query catalog on several layouts")
    run.add_argument("--data", required=True, help="CSV directory from 'bench generate'")
    run.add_argument("--layouts", default="full,poly1,poly2")
    run.add_argument("--queries", default="1-27")
    run.add_argument("--reps", type=int, default=3)
    run.add_argument("--report", help="write the percent-decrease TSV here")
    run.add_argument("--markdown", help="write the markdown table here")
    run.add_argument("--timings", help="write median timings TSV here")

    st = sub.add_parser("stats", help="node/edge counts by label and type")
    st.add_argument("--graph", required=True)
    st.add_argument("--layout", choices=["full", "poly1", "poly2"])

    ex = sub.add_parser("export", help="export a graph as JSON Graph or CSV snapshot")
    ex.add_argument("--graph", required=True)
    ex.add_argument("--layout", choices=["full", "poly1", "poly2"])
    ex.add_argument("--format", default="json", choices=["json", "csv", "snapshot"])
    ex.add_argument("--out", required=True)

    mg = sub.add_parser("metagraph", help="build the context metagraph")
    mg.add_argument("--graph", required=True)
    mg.add_argument("--scope", help="MATCH query returning one node column")
    mg.add_argument("--out", help="JSON output file (stdout when omitted)")

    en = sub.add_parser("enrich", help="add sharesContext edges and save a snapshot")
    en.add_argument("--graph", required=True)
    en.add_argument("--scope", help="MATCH query returning one node column")
    en.add_argument("--out", required=True)
    return p


def _generate_args(p):
    p.add_argument("--scale", type=float, default=1e-4)
    p.add_argument("--out", required=True)


def _scope(graph, store, layout, text):
    if not text:
        return None
    table = evaluate(graph, text, LayoutContext(store, layout, _deadline()))
    if table.kinds != ["node"]:
        raise _UsageError("--scope query must return exactly one node column")
    return sorted(set(table.column(table.columns[0])))


def _cmd_import(args, out):
    nodes, edges = [Path(x) for x in args.nodes], [Path(x) for x in args.edges]
    if args.dir:
        n, e = discover_csvs(args.dir)
        nodes += n
        edges += e
    if not nodes:
        raise _UsageError("no node files given (use --nodes or --dir)")
    layout = get_layout(args.layout)
    graph, store, report = bulk_import(nodes, edges, layout)
    save_snapshot(graph, args.out, layout, store)
    out.write(report.to_json() + "\n")


def _cmd_generate(args, out):
    from .bench import GenParams, generate

    gen = generate(GenParams(scale=args.scale, seed=args.seed), out_dir=args.out)
    out.write(json.dumps({"nodes": gen.graph.node_count, "edges": gen.graph.edge_count,
                          "labels": gen.graph.label_counts(),
                          "types": gen.graph.type_counts()}, sort_keys=True) + "\n")


def _cmd_query(args, out):
    graph, store, layout = _load_graph(args.graph, args.layout)
    ctx = LayoutContext(store, layout, _deadline(), args.hop_bound, args.seed)
    table = evaluate(graph, args.q, ctx, allow_disconnected=args.allow_disconnected)
    if args.format == "json":
        out.write(export_json_graph(graph, table, store))
    else:
        out.write(table.to_tsv())


def _cmd_bench(args, out):
    from .bench import parse_selection, report_render, run_suite, timings_tsv

    if args.bench_command == "generate":
        return _cmd_generate(args, out)
    if args.bench_command != "run":
        raise _UsageError("bench needs a subcommand: generate or run")
    layouts = [x.strip() for x in args.layouts.split(",") if x.strip()]
    for name in layouts:
        get_layout(name)
    try:
        numbers = parse_selection(args.queries)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    report = run_suite(args.data, layouts, numbers, args.reps, _deadline())
    tsv, md = report_render(report)
    if args.report:
        Path(args.report).write_text(tsv, encoding="utf-8")
    if args.markdown:
        Path(args.markdown).write_text(md, encoding="utf-8")
    if args.timings:
        Path(args.timings).write_text(timings_tsv(report), encoding="utf-8")
    out.write(md)
    if any(r.status == "timeout" for r in report.runs.values()):
        return EXIT_TIMEOUT
    return EXIT_OK


def _cmd_stats(args, out):
    graph, store, layout = _load_graph(args.graph, args.layout)
    fp = footprint(graph, store, layout)
    out.write(json.dumps({
        "layout": layout.name,
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "labels": graph.label_counts(),
        "types": graph.type_counts(),
        "graph_string_bytes": fp.graph_string_bytes,
        "dictionary_bytes": fp.dict_bytes,
    }, indent=2, sort_keys=True) + "\n")


def _cmd_export(args, out):
    graph, store, layout = _load_graph(args.graph, args.layout)
    if args.format == "json":
        Path(args.out).write_text(export_json_graph(graph, store=store), encoding="utf-8")
    elif args.format == "csv":
        write_graph_csvs(graph, args.out)
    else:
        save_snapshot(graph, args.out, layout, store)
    out.write(f"wrote {args.out}\n")


def _cmd_metagraph(args, out):
    graph, store, layout = _load_graph(args.graph, None)
    scope = _scope(graph, store, layout, args.scope)
    meta = build_metagraph(graph, ContextModel(), scope, store=store,
                           deadline=time.monotonic() + _deadline())
    text = dumps(metagraph_document(graph, meta, store))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        out.write(f"{len(meta.contexts)} contexts, {len(meta.meta_edges)} meta-edges\n")
    else:
        out.write(text)


def _cmd_enrich(args, out):
    graph, store, layout = _load_graph(args.graph, None)
    scope = _scope(graph, store, layout, args.scope)
    graph, added = enrich_graph(graph, ContextModel(), store=store, subgraph_nodes=scope,
                                deadline=time.monotonic() + _deadline())
    save_snapshot(graph, args.out, layout, store)
    out.write(json.dumps({"edges_added": added}) + "\n")


COMMANDS = {
    "import": _cmd_import,
    "generate": _cmd_generate,
    "query": _cmd_query,
    "bench": _cmd_bench,
    "stats": _cmd_stats,
    "export": _cmd_export,
    "metagraph": _cmd_metagraph,
    "enrich": _cmd_enrich,
}


def cli_dispatch(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        code = COMMANDS[args.command](args, out)
        return EXIT_OK if code is None else code
    except _UsageError as exc:
        err.write(f"ctxgraph: usage error: {exc}\n\n{parser.format_usage()}\n{GRAMMAR}")
        return EXIT_USAGE
    except QuerySyntaxError as exc:
        err.write(f"ctxgraph: query error: {exc}\n\n{GRAMMAR}")
        return EXIT_USAGE
    except TimedOut as exc:
        hint = " (narrow the work with --scope)" if args.command in ("metagraph", "enrich") else ""
        err.write(f"ctxgraph: timed out: {exc}{hint}\n")
        return EXIT_TIMEOUT
    except (CtxGraphError, OSError, ValueError, KeyError) as exc:
        err.write(f"ctxgraph: error: {exc}\n")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()

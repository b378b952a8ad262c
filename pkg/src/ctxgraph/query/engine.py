"""Query evaluation: pattern matching, projection, ordering and algorithm calls."""

from __future__ import annotations

import datetime as _dt
import time
from collections import Counter
from dataclasses import dataclass, field

from .. import algorithms as algo
from ..errors import QuerySyntaxError
from ..graph import Graph
from .ast import AlgoSpec, Count, Literal, PathAtom, PatternAtom, Prop, QuerySpec, Var
from .matcher import LayoutContext, PatternMatcher, attr_of
from .parser import parse_query
from .paths import Path, shortest_path

MAX_PATH_ATOMS = 2


@dataclass
class ResultTable:
    """Query output. ``kinds`` tags each column: node, edge, path or value."""

    columns: list[str]
    kinds: list[str]
    rows: list[tuple] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    # edge ids matched by the bindings behind each row
    support: list[frozenset] = field(default_factory=list, repr=False, compare=False)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def multiset(self) -> Counter:
        return Counter(self.rows)

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(format_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def subgraph(self, graph: Graph) -> tuple[list[int], list[int]]:
        """Node and edge ids a row-set touches, for graph-shaped export.

        Nodes are returned node columns plus path nodes; edges are returned
        edge columns, path edges, and matched edges joining two returned
        nodes.
        """
        nodes: set[int] = set()
        edges: set[int] = set()
        for row in self.rows:
            for kind, value in zip(self.kinds, row):
                if value is None:
                    continue
                if kind == "node":
                    nodes.add(value)
                elif kind == "edge":
                    edges.add(value)
                elif kind == "path":
                    nodes.update(value.nodes)
                    edges.update(value.edges)
        for matched in self.support[:len(self.rows)]:
            for e in matched:
                if graph.edge_src(e) in nodes and graph.edge_dst(e) in nodes:
                    edges.add(e)
        for e in edges:
            nodes.add(graph.edge_src(e))
            nodes.add(graph.edge_dst(e))
        return sorted(nodes), sorted(edges)


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Path):
        return ",".join(str(i) for i in value.ids)
    if isinstance(value, _dt.date):
        return value.isoformat()
    if isinstance(value, tuple):
        return ";".join(format_cell(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sort_key(value):
    """Total order over mixed cell values; nulls sort first."""
    if value is None:
        return (0,)
    if isinstance(value, (bool, int, float)):
        return (1, value)
    if isinstance(value, str):
        return (2, value)
    if isinstance(value, _dt.date):
        return (3, value.isoformat())
    if isinstance(value, Path):
        return (4, value.ids)
    if isinstance(value, tuple):
        return (5, tuple(sort_key(v) for v in value))
    return (6, repr(value))


def _row_key(row):
    return tuple(sort_key(v) for v in row)


# -- MATCH evaluation ------------------------------------------------------------------

def _kind_of(expr, roles) -> str:
    if isinstance(expr, Var):
        return roles.get(expr.name, "path")
    return "value"


def _chain_paths(spec: QuerySpec, binding: dict) -> dict:
    out = {}
    for chain in spec.chains:
        if not chain.path_var:
            continue
        ids = [binding[chain.first]]
        for ai in chain.steps:
            atom = spec.atoms[ai]
            if isinstance(atom, PatternAtom):
                ids += [binding[atom.edge_var], binding[atom.dst_var]]
            else:
                ids += list(binding[atom.path_var].ids[1:])
        out[chain.path_var] = Path(tuple(ids))
    return out


def _match_table(graph: Graph, spec: QuerySpec, ctx: LayoutContext,
                 allow_disconnected: bool) -> ResultTable:
    matcher = PatternMatcher(graph, spec.atoms, dict(spec.nodes), spec.conditions, ctx,
                             allow_disconnected)
    roles = dict(matcher.roles)
    for var in spec.path_vars:
        roles[var] = "path"
    items = spec.return_items
    kinds = [_kind_of(i.expr, roles) for i in items]
    has_count = any(isinstance(i.expr, Count) for i in items)

    order_cols = []
    hidden = []
    for o in spec.order_by:
        pos = _column_for(o.expr, items)
        if pos is None:
            if has_count or spec.distinct:
                raise QuerySyntaxError("with DISTINCT or count(), ORDER BY must name a "
                                       "returned column")
            pos = len(items) + len(hidden)
            hidden.append(o.expr)
        order_cols.append((pos, o.descending))

    bindings = matcher.run() if spec.limit != 0 else []
    edge_vars = [a.edge_var for a in spec.atoms if isinstance(a, PatternAtom)]

    def value(expr, binding):
        if isinstance(expr, Var):
            return binding[expr.name]
        if isinstance(expr, Prop):
            return attr_of(graph, binding, roles, expr.var, expr.key, ctx)
        if isinstance(expr, Literal):
            return expr.value
        return None

    rows: list[tuple] = []
    support: list[set] = []
    groups: dict[tuple, int] = {}
    for binding in bindings:
        if spec.path_vars:
            binding.update(_chain_paths(spec, binding))
        matched = {binding[v] for v in edge_vars}
        for a in spec.atoms:
            if isinstance(a, PathAtom):
                matched.update(binding[a.path_var].edges)
        row = tuple(value(i.expr, binding) for i in items) + \
            tuple(value(h, binding) for h in hidden)
        if has_count:
            key = tuple(None if isinstance(i.expr, Count) else v for i, v in zip(items, row))
            pos = groups.get(key)
            if pos is None:
                pos = groups[key] = len(rows)
                rows.append(tuple(0 if isinstance(i.expr, Count) else v
                                  for i, v in zip(items, row)))
                support.append(set())
            rows[pos] = tuple(v + 1 if isinstance(i.expr, Count) else v
                              for i, v in zip(items, rows[pos]))
            support[pos] |= matched
        else:
            rows.append(row)
            support.append(matched)

    paired = list(zip(rows, support))
    if spec.distinct:
        merged: dict[tuple, set] = {}
        for row, sup in paired:
            merged.setdefault(row, set()).update(sup)
        paired = list(merged.items())
    paired.sort(key=lambda rs: _row_key(rs[0]))
    for pos, descending in reversed(order_cols):
        paired.sort(key=lambda rs, p=pos: sort_key(rs[0][p]), reverse=descending)
    if spec.limit is not None:
        paired = paired[:spec.limit]
    width = len(items)
    return ResultTable([i.name for i in items], kinds,
                       [row[:width] for row, _ in paired],
                       support=[frozenset(s) for _, s in paired])


def _column_for(expr, items):
    for pos, item in enumerate(items):
        if item.expr == expr:
            return pos
        if isinstance(expr, Var) and item.name == expr.name:
            return pos
    return None


# -- public entry points ---------------------------------------------------------------

def _prepare(spec, ctx):
    ctx = ctx or LayoutContext()
    if isinstance(spec, str):
        spec = parse_query(spec, hop_bound=ctx.hop_bound)
    return spec, ctx


def eval_ecrpq(graph: Graph, spec: QuerySpec | str, ctx: LayoutContext | None = None, *,
               allow_disconnected: bool = False) -> ResultTable:
    """Conjunctive query with regular-path atoms whose witness walks are returned."""
    spec, ctx = _prepare(spec, ctx)
    path_atoms = [a for a in spec.atoms if isinstance(a, PathAtom)]
    if len(path_atoms) > MAX_PATH_ATOMS:
        raise QuerySyntaxError(f"at most {MAX_PATH_ATOMS} path atoms are supported, "
                               f"got {len(path_atoms)}")
    for atom in path_atoms:
        if atom.max_hops > ctx.hop_bound:
            raise QuerySyntaxError(f"path atom allows {atom.max_hops} hops; the bound is "
                                   f"{ctx.hop_bound}")
    return _match_table(graph, spec, ctx, allow_disconnected)


def evaluate(graph: Graph, spec: QuerySpec | str, ctx: LayoutContext | None = None, *,
             allow_disconnected: bool = False) -> ResultTable:
    """Run a parsed (or textual) query; attribute values come back decoded."""
    spec, ctx = _prepare(spec, ctx)
    start = time.perf_counter()
    if spec.algo_call is not None:
        table = run_call(graph, spec.algo_call, ctx)
    elif any(isinstance(a, PathAtom) for a in spec.atoms):
        table = eval_ecrpq(graph, spec, ctx, allow_disconnected=allow_disconnected)
    else:
        table = _match_table(graph, spec, ctx, allow_disconnected)
    table.provenance.update(layout=ctx.layout.name,
                            elapsed_s=time.perf_counter() - start)
    return table


# -- CALL dispatch ------------------------------------------------------------------------

_ALIASES = {
    "pagerank": "pagerank",
    "page_rank": "pagerank",
    "degree": "degree",
    "degree_centrality": "degree",
    "betweenness": "betweenness",
    "betweenness_centrality": "betweenness",
    "components": "components",
    "connected_components": "components",
    "louvain": "louvain",
    "shortest_path": "shortest_path",
}

_DEFAULT_DIRECTION = {
    "pagerank": "directed",
    "degree": "directed",
    "betweenness": "undirected",
    "components": "undirected",
    "louvain": "undirected",
    "shortest_path": "directed",
}


def _as_list(value):
    if value is None:
        return []
    if isinstance(value, tuple):
        return list(value)
    return [value]


def _node_arg(graph, value, ctx) -> list[int] | None:
    """Resolve a node-set argument: ids, or MATCH queries returning one node column."""
    if value is None:
        return None
    out: set[int] = set()
    for item in _as_list(value):
        if isinstance(item, int) and not isinstance(item, bool):
            out.add(item)
            continue
        table = evaluate(graph, str(item), ctx)
        if table.kinds.count("node") != 1 or len(table.columns) != 1:
            raise QuerySyntaxError("a node-set query must return exactly one node column")
        out.update(table.column(table.columns[0]))
    return sorted(out)


def _edge_arg(graph, value, ctx):
    """``(types, pairs)``: an edge-type list, or pairs from a two-column query."""
    if value is None:
        return None, None
    items = _as_list(value)
    if len(items) == 1 and str(items[0]).lstrip().upper().startswith("MATCH"):
        table = evaluate(graph, str(items[0]), ctx)
        if table.kinds[:2] != ["node", "node"] or len(table.columns) != 2:
            raise QuerySyntaxError("an edge query must return (source, target) node columns")
        return None, [(u, v) for u, v in table.rows]
    types = []
    for item in items:
        types.extend(t for t in str(item).split("|") if t)
    return types, None


def _projection(graph, call: AlgoSpec, ctx, kind) -> tuple[algo.Projection, set[int] | None]:
    nodes = _node_arg(graph, call.arg("nodes"), ctx)
    label = call.arg("label")
    types, pairs = _edge_arg(graph, call.arg("edges"), ctx)
    direction = call.arg("direction", _DEFAULT_DIRECTION[kind])
    if pairs is not None:
        proj = algo.Projection.from_graph(graph, node_set=nodes or (), edge_pairs=pairs,
                                          direction=direction)
        report = set(nodes) if nodes is not None else None
    else:
        proj = algo.Projection.from_graph(graph, node_set=nodes, label=label,
                                          edge_types=types, direction=direction)
        report = None
    return proj, report


def _score_table(scores, call, graph, report):
    rlabel = call.arg("return_label")
    items = [(n, s) for n, s in scores.items()
             if (report is None or n in report) and (rlabel is None or rlabel in graph.labels(n))]
    items.sort(key=lambda ns: (-ns[1], ns[0]))
    top = call.arg("top")
    if top is not None:
        items = items[:int(top)]
    return ResultTable(["node", "score"], ["node", "value"], [tuple(x) for x in items])


def _partition_table(part: algo.Partition, call, graph, report, column):
    rlabel = call.arg("return_label")
    rows = sorted(((n, c) for n, c in part.assignment.items()
                   if (report is None or n in report)
                   and (rlabel is None or rlabel in graph.labels(n))),
                  key=lambda nc: (nc[1], nc[0]))
    table = ResultTable(["node", column], ["node", "value"], rows)
    if part.modularity is not None:
        table.provenance["modularity"] = part.modularity
        table.provenance["pass_modularities"] = list(part.pass_modularities)
    return table


def run_call(graph: Graph, call: AlgoSpec, ctx: LayoutContext | None = None) -> ResultTable:
    """Execute ``CALL name(args)``.

    Common arguments: ``nodes`` (ids or MATCH queries), ``edges`` (type list
    or a MATCH query returning node pairs), ``direction``, ``top`` and
    ``return_label``.
    """
    ctx = ctx or LayoutContext()
    kind = _ALIASES.get(call.name.lower())
    if kind is None:
        raise QuerySyntaxError(f"unknown algorithm {call.name!r}")
    if kind == "shortest_path":
        return _call_shortest_path(graph, call, ctx)
    proj, report = _projection(graph, call, ctx, kind)
    if kind == "pagerank":
        scores = algo.pagerank(graph, proj, float(call.arg("damping", 0.85)),
                               int(call.arg("max_iter", 100)), float(call.arg("tol", 1e-8)))
        return _score_table(scores, call, graph, report)
    if kind == "degree":
        scores = algo.degree_centrality(graph, proj, call.arg("mode", "both"))
        return _score_table(scores, call, graph, report)
    if kind == "betweenness":
        scores = algo.betweenness_centrality(graph, proj, bool(call.arg("normalized", False)),
                                             int(call.arg("budget", algo.DEFAULT_NODE_BUDGET)))
        return _score_table(scores, call, graph, report)
    if kind == "components":
        part = algo.connected_components(graph, proj, bool(call.arg("strong", False)))
        return _partition_table(part, call, graph, report, "component")
    part = algo.louvain(graph, proj, int(call.arg("max_passes", 10)),
                        int(call.arg("seed", ctx.seed)))
    return _partition_table(part, call, graph, report, "community")


def _call_shortest_path(graph, call, ctx):
    sources = _node_arg(graph, call.arg("source"), ctx) or []
    targets = _node_arg(graph, call.arg("target"), ctx) or []
    types, _ = _edge_arg(graph, call.arg("types", call.arg("edges")), ctx)
    direction = call.arg("direction", "directed")
    deadline = ctx.deadline()
    best = None
    for u in sources:
        for v in targets:
            path = shortest_path(graph, u, v, types, direction, deadline)
            if path is not None and (best is None or (len(path), path.ids) < (len(best), best.ids)):
                best = path
    rows = [] if best is None else [(best,)]
    return ResultTable(["path"], ["path"], rows)

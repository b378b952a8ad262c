"""Independent reference implementations used to freeze expected values.

Each oracle is written for clarity rather than speed and shares no code with
the package beyond the read-only graph accessors.
"""

from __future__ import annotations

import itertools
import operator
import re
from collections import deque

import numpy as np

from ctxgraph.query.regex import Alt, Cat, Eps, Opt, Plus, Star, Sym

# -- context metagraph ------------------------------------------------------------


def node_contexts(graph, context_types) -> dict[int, set[int]]:
    """con(v) by scanning every edge once."""
    con = {v: set() for v in graph.nodes()}
    for e in graph.edges():
        if graph.edge_type(e) in context_types:
            s, d = graph.edge_src(e), graph.edge_dst(e)
            con[s].add(d)
            con[d].add(s)
    return con


def edge_contexts(graph, resolvers, decode=None) -> dict[int, set[int]]:
    """con(r) for attribute resolvers ``{(etype, key): (label, target_key)}`` by full scan."""
    con = {}
    for e in graph.edges():
        found = set()
        for (etype, key), (label, target_key) in resolvers.items():
            value = graph.edge_attrs(e).get(key)
            if graph.edge_type(e) != etype or value is None:
                continue
            if decode is not None:
                value = decode(value)
            for v in graph.nodes():
                stored = graph.node_attrs(v).get(target_key)
                if decode is not None and stored is not None:
                    stored = decode(stored)
                if label in graph.labels(v) and stored == value:
                    found.add(v)
        con[e] = found
    return con


def metagraph_oracle(graph, context_types, resolvers, include_self_loops=False):
    """Loop over (edge, c1, c2) testing the three conditions literally.

    Returns ``{(c1, c2): (witness_count, condition_mask)}``.
    """
    ncon = node_contexts(graph, context_types)
    econ = edge_contexts(graph, resolvers)
    witnesses: dict[tuple[int, int], set[int]] = {}
    masks: dict[tuple[int, int], int] = {}
    for e in graph.edges():
        v1, v2 = graph.edge_src(e), graph.edge_dst(e)
        # any firing condition needs c1 in con(v1) | con(e) and c2 in con(v2) | con(e)
        for c1 in sorted(ncon[v1] | econ[e]):
            for c2 in sorted(ncon[v2] | econ[e]):
                if c1 == c2 and not include_self_loops:
                    continue
                bits = 0
                if c1 in ncon[v1] and c2 in ncon[v2]:
                    bits |= 1
                if c1 in econ[e] and c2 in ncon[v2]:
                    bits |= 2
                if c1 in ncon[v1] and c2 in econ[e]:
                    bits |= 4
                if bits:
                    pair = (min(c1, c2), max(c1, c2))
                    witnesses.setdefault(pair, set()).add(e)
                    masks[pair] = masks.get(pair, 0) | bits
    return {pair: (len(ws), masks[pair]) for pair, ws in witnesses.items()}


# -- regular path queries -----------------------------------------------------------

_DIR = {"out": "o", "in": "i", "both": "[oi]"}


def regex_to_re(node) -> str:
    """Translate a regex AST into a Python pattern over step tokens ``type:o;``/``type:i;``."""
    if isinstance(node, Sym):
        name = "[^:;]+" if node.type is None else re.escape(node.type)
        return f"{name}:{_DIR[node.dir]};"
    if isinstance(node, Eps):
        return ""
    if isinstance(node, Cat):
        return "".join(f"(?:{regex_to_re(p)})" for p in node.parts)
    if isinstance(node, Alt):
        return "(?:" + "|".join(f"(?:{regex_to_re(p)})" for p in node.options) + ")"
    if isinstance(node, Star):
        return f"(?:{regex_to_re(node.inner)})*"
    if isinstance(node, Plus):
        return f"(?:{regex_to_re(node.inner)})+"
    if isinstance(node, Opt):
        return f"(?:{regex_to_re(node.inner)})?"
    raise TypeError(node)


def walk_moves(graph, v):
    """Every single-edge move out of ``v`` as ``(token, neighbour)``."""
    for e in graph.out_edges(v):
        yield f"{graph.edge_type(e)}:o;", graph.edge_dst(e)
    for e in graph.in_edges(v):
        yield f"{graph.edge_type(e)}:i;", graph.edge_src(e)


def rpq_oracle(graph, regex_ast, sources=None, targets=None, min_hops=0, max_hops=4):
    """Enumerate every walk of length <= max_hops and test its word against ``re``.

    Walks are grouped by (source, word) so repeated words are matched once.
    """
    pattern = re.compile(regex_to_re(regex_ast))
    verdict: dict[str, bool] = {}
    sources = list(graph.nodes()) if sources is None else sources
    result = set()
    for u in sources:
        layer = {"": {u}}
        for hops in range(max_hops + 1):
            if hops >= min_hops:
                for word, ends in layer.items():
                    if word not in verdict:
                        verdict[word] = pattern.fullmatch(word) is not None
                    if verdict[word]:
                        result.update((u, v) for v in ends)
            if hops == max_hops:
                break
            nxt: dict[str, set[int]] = {}
            for word, ends in layer.items():
                for v in ends:
                    for token, w in walk_moves(graph, v):
                        nxt.setdefault(word + token, set()).add(w)
            layer = nxt
    if targets is not None:
        result = {(u, v) for u, v in result if v in targets}
    return result


# -- centralities ----------------------------------------------------------------------

def dense_pagerank(nodes, edges, damping=0.85, max_iter=100, tol=1e-8, directed=True):
    """Power iteration on the explicit dense Google matrix, same stopping rule."""
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((n, n))
    pairs = list(edges) + ([] if directed else [(v, u) for u, v in edges])
    for u, v in pairs:
        a[idx[v], idx[u]] += 1.0
    out = a.sum(axis=0)
    google = np.empty((n, n))
    for j in range(n):
        column = a[:, j] / out[j] if out[j] else np.full(n, 1.0 / n)
        google[:, j] = damping * column + (1 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = google @ x
        y /= y.sum()
        delta = np.abs(y - x).sum()
        x = y
        if delta < tol:
            break
    return {v: float(x[idx[v]]) for v in nodes}


def exact_pagerank(nodes, edges, damping=0.85):
    """Stationary vector of the Google matrix by a linear solve."""
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((n, n))
    for u, v in edges:
        a[idx[v], idx[u]] += 1.0
    out = a.sum(axis=0)
    p = np.where(out > 0, a / np.where(out > 0, out, 1), 1.0 / n)
    x = np.linalg.solve(np.eye(n) - damping * p, np.full(n, (1 - damping) / n))
    x /= x.sum()
    return {v: float(x[idx[v]]) for v in nodes}


def apsp_betweenness(nodes, edges, directed=False):
    """Betweenness from shortest-path counts read off adjacency-matrix powers.

    ``sigma(s, t)`` is the number of walks of length ``dist(s, t)``, which are
    exactly the shortest paths. Loops and parallel edges are ignored.
    """
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((n, n))
    for u, v in edges:
        if u != v:
            a[idx[u], idx[v]] = 1.0
            if not directed:
                a[idx[v], idx[u]] = 1.0
    dist = np.full((n, n), np.inf)
    sigma = np.zeros((n, n))
    np.fill_diagonal(dist, 0)
    np.fill_diagonal(sigma, 1)
    power = np.eye(n)
    for k in range(1, n):
        power = power @ a
        fresh = (power > 0) & np.isinf(dist)
        dist[fresh] = k
        sigma[fresh] = power[fresh]
    bc = np.zeros(n)
    for s, t in itertools.permutations(range(n), 2):
        if np.isinf(dist[s, t]):
            continue
        for v in range(n):
            if v in (s, t):
                continue
            if dist[s, v] + dist[v, t] == dist[s, t]:
                bc[v] += sigma[s, v] * sigma[v, t] / sigma[s, t]
    if not directed:
        bc /= 2
    return {v: float(bc[idx[v]]) for v in nodes}


# -- components and communities ----------------------------------------------------

def bfs_components(nodes, edges, strong=False):
    """Component id (smallest member) per node, by flood fill or mutual reachability."""
    out = {v: set() for v in nodes}
    back = {v: set() for v in nodes}
    for u, v in edges:
        out[u].add(v)
        back[v].add(u)

    def reach(start, adj):
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    if strong:
        fwd = {v: reach(v, out) for v in nodes}
        return {v: min(w for w in fwd[v] if v in fwd[w]) for v in nodes}
    both = {v: out[v] | back[v] for v in nodes}
    return {v: min(reach(v, both)) for v in nodes}


def modularity_oracle(nodes, edges, assignment) -> float:
    """Matrix form ``1/2m * sum_ij (A_ij - k_i k_j / 2m) [c_i = c_j]`` with A_ii = 2 per loop."""
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((n, n))
    for u, v in edges:
        a[idx[u], idx[v]] += 1.0
        a[idx[v], idx[u]] += 1.0
    k = a.sum(axis=1)
    two_m = k.sum()
    if two_m == 0:
        return 0.0
    same = np.array([[assignment[u] == assignment[v] for v in nodes] for u in nodes])
    return float(((a - np.outer(k, k) / two_m) * same).sum() / two_m)


def set_partitions(items):
    """Every partition of ``items`` as a list of blocks."""
    items = list(items)
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]
        yield [[head]] + part


def best_partition(nodes, edges):
    """Exhaustive modularity maximum: ``(q, assignment)`` (feasible up to ~10 nodes)."""
    best = (-1.0, None)
    for part in set_partitions(nodes):
        assignment = {v: i for i, block in enumerate(part) for v in block}
        q = modularity_oracle(nodes, edges, assignment)
        if q > best[0] + 1e-12:
            best = (q, assignment)
    return best


# -- pattern matching ----------------------------------------------------------------

def _operand(graph, expr, binding, edge_vars):
    from ctxgraph.query import Literal, Prop, Var
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Var):
        return binding[expr.name]
    if isinstance(expr, Prop):
        ident = binding[expr.var]
        attrs = graph.edge_attrs(ident) if expr.var in edge_vars else graph.node_attrs(ident)
        return attrs.get(expr.key)
    raise TypeError(expr)


_OPS = {"=": operator.eq, "!=": operator.ne, "<": operator.lt, ">": operator.gt,
        "<=": operator.le, ">=": operator.ge}


def _holds(left, op, right):
    if op == "ISNULL":
        return left is None
    if op == "NOTNULL":
        return left is not None
    return left is not None and right is not None and _OPS[op](left, right)


def pattern_oracle(graph, atoms, nodes, conditions=()):
    """Naive nested-loop join over plain (unencoded) graphs.

    Every atom loops over the full edge list in both orientations; node and
    edge predicates and WHERE conditions are checked once all variables are
    bound. Returns the bindings as a list of dicts.
    """
    edge_vars = {a.edge_var for a in atoms}
    partial = [{}]
    for atom in atoms:
        grown = []
        for binding in partial:
            for e in graph.edges():
                if atom.types is not None and graph.edge_type(e) not in atom.types:
                    continue
                s, d = graph.edge_src(e), graph.edge_dst(e)
                ends = {"out": {(s, d)}, "in": {(d, s)}, "both": {(s, d), (d, s)}}[atom.direction]
                for a, b in ends:
                    if binding.get(atom.src_var, a) != a:
                        continue
                    if atom.src_var == atom.dst_var and a != b:
                        continue
                    if binding.get(atom.dst_var, b) != b:
                        continue
                    if binding.get(atom.edge_var, e) != e:
                        continue
                    grown.append({**binding, atom.src_var: a, atom.dst_var: b, atom.edge_var: e})
        partial = grown

    def spec_ok(binding, attrs, props):
        for key, value in props:
            want = _operand(graph, value, binding, edge_vars)
            if attrs.get(key) is None or attrs.get(key) != want:
                return False
        return True

    out = []
    for binding in partial:
        ok = all(set(spec.labels) <= graph.labels(binding[var])
                 and spec_ok(binding, graph.node_attrs(binding[var]), spec.props)
                 for var, spec in nodes.items())
        ok = ok and all(spec_ok(binding, graph.edge_attrs(binding[a.edge_var]), a.props)
                        for a in atoms)
        ok = ok and all(_holds(_operand(graph, c.left, binding, edge_vars), c.op,
                               None if c.right is None
                               else _operand(graph, c.right, binding, edge_vars))
                        for c in conditions)
        if ok:
            out.append(binding)
    return out

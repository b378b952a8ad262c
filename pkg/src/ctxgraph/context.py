"""Context mapping, context metagraph, context hypergraph and enrichment.

A node's context is the set of its neighbours reached through designated
*context edge types* (annotations, affiliations, journals, ...). An edge's
context comes from its attributes: e.g. a ``hasRelation`` edge names the
document it was extracted from in ``context``, which resolves to that
document node. Contexts are themselves nodes of the graph (the general case
where the context universe is the entity set).
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterable
from dataclasses import dataclass, field

from .dictionary import DictionaryStore
from .errors import TimedOut, UnknownElement, UnknownNode
from .graph import Code, Graph

log = logging.getLogger(__name__)

COND_ENDPOINTS = 1   # c1 in con(v1), c2 in con(v2)
COND_EDGE_HEAD = 2   # c1 in con(edge), c2 in con(v2)
COND_TAIL_EDGE = 4   # c1 in con(v1), c2 in con(edge)

SHARES_CONTEXT = "sharesContext"

DEFAULT_CONTEXT_EDGE_TYPES = frozenset(
    {"hasAnnotation", "hasAffiliation", "publishedIn", "hasPublicationType", "hasDocument"})


@dataclass(frozen=True)
class ContextModel:
    """How ``con`` is derived for nodes and edges.

    ``context_attr_resolvers`` maps ``(edge type, attribute)`` to the
    ``(label, attribute)`` whose value identifies the context node.
    ``edge_inherits_endpoints`` additionally gives every edge the contexts of
    both its endpoints; it is off by default.
    """

    context_edge_types: frozenset = DEFAULT_CONTEXT_EDGE_TYPES
    context_attr_resolvers: tuple = ((("hasRelation", "context"), ("Document", "documentID")),)
    edge_inherits_endpoints: bool = False
    context_universe: str = "E"

    def validate(self, graph: Graph) -> None:
        indexed = set(graph.indexed_keys())
        for (etype, key), target in self.context_attr_resolvers:
            if target not in indexed:
                raise ValueError(f"resolver for {etype}.{key} targets unindexed {target}")


class ContextResolver:
    """Computes ``con`` with per-element memoisation over an unmutated graph."""

    def __init__(self, graph: Graph, model: ContextModel | None = None,
                 store: DictionaryStore | None = None):
        self.graph = graph
        self.model = model or ContextModel()
        self.store = store
        self._types = sorted(self.model.context_edge_types)
        self._node_cache: dict[int, frozenset[int]] = {}
        self._edge_cache: dict[int, frozenset[int]] = {}
        self.unresolved: list[tuple[int, str, str]] = []

    def node(self, v: int) -> frozenset[int]:
        cached = self._node_cache.get(v)
        if cached is not None:
            return cached
        if not self.graph.has_node(v):
            raise UnknownElement(f"node {v}")
        g = self.graph
        out = set()
        for t in self._types:
            for e in g.typed_out(v, t):
                out.add(g.edge_dst(e))
            for e in g.typed_in(v, t):
                out.add(g.edge_src(e))
        result = self._node_cache[v] = frozenset(out)
        return result

    def edge(self, r: int) -> frozenset[int]:
        cached = self._edge_cache.get(r)
        if cached is not None:
            return cached
        g = self.graph
        if not g.has_edge(r):
            raise UnknownElement(f"edge {r}")
        etype = g.edge_type(r)
        attrs = g.edge_attrs(r)
        out = set()
        for (rtype, key), (label, target_key) in self.model.context_attr_resolvers:
            if rtype != etype or key not in attrs:
                continue
            value = attrs[key]
            if isinstance(value, Code):
                if self.store is None:
                    log.warning("edge %d: cannot decode %r without dictionaries", r, value)
                    continue
                value = self.store.decode_code(value)
            hits = self._lookup(label, target_key, value)
            if not hits:
                log.warning("edge %d: context %s=%r resolves to no %s node", r, key, value, label)
                self.unresolved.append((r, key, value))
            out.update(hits)
        if self.model.edge_inherits_endpoints:
            out |= self.node(g.edge_src(r))
            out |= self.node(g.edge_dst(r))
        result = self._edge_cache[r] = frozenset(out)
        return result

    def _lookup(self, label, key, value):
        g = self.graph
        hits = g.index_lookup(label, key, value)
        if hits:
            return hits
        ns_store = self.store
        if ns_store is not None:
            # the target attribute may itself be dictionary-encoded
            values = g.index_values(label, key)
            namespaces = {v.namespace for v in values or () if isinstance(v, Code)}
            for ns in sorted(namespaces):
                code = ns_store.lookup(ns, value)
                if code is not None:
                    return g.index_lookup(label, key, code) or []
        if hits is None:
            return g.find_nodes(label, [(key, "equals", value)], use_index=False,
                                decode=ns_store.decode_code if ns_store else None)
        return []


def con(graph: Graph, model: ContextModel | None = None, *, node: int | None = None,
        edge: int | None = None, store: DictionaryStore | None = None) -> frozenset[int]:
    """Contexts of exactly one of ``node`` or ``edge``; may be empty."""
    if (node is None) == (edge is None):
        raise TypeError("pass exactly one of node= or edge=")
    resolver = ContextResolver(graph, model, store)
    return resolver.node(node) if node is not None else resolver.edge(edge)


def neighborhood(graph: Graph, node_set: Iterable[int]) -> set[int]:
    """All graph neighbours of ``node_set`` (any edge type, both directions)."""
    out = set()
    for v in node_set:
        if not graph.has_node(v):
            raise UnknownNode(v)
        for e in graph.out_edges(v):
            out.add(graph.edge_dst(e))
        for e in graph.in_edges(v):
            out.add(graph.edge_src(e))
    return out


def extended_context_subgraph(graph: Graph, node_set: Iterable[int]) -> Graph:
    """Induced subgraph over ``node_set`` plus its neighbourhood."""
    node_set = set(node_set)
    return graph.induced_subgraph(node_set | neighborhood(graph, node_set))


@dataclass
class MetaEdge:
    c1: int
    c2: int
    witness_count: int
    condition_mask: int


@dataclass
class Metagraph:
    contexts: set[int] = field(default_factory=set)
    meta_edges: dict[tuple[int, int], MetaEdge] = field(default_factory=dict)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.meta_edges)

    def __len__(self):
        return len(self.meta_edges)


def build_metagraph(graph: Graph, model: ContextModel | None = None,
                    scope: Iterable[int] | None = None, *,
                    store: DictionaryStore | None = None,
                    include_self_loops: bool = False,
                    resolver: ContextResolver | None = None,
                    deadline: float | None = None) -> Metagraph:
    """Connect two contexts whenever a graph edge links elements bearing them.

    Edges are considered when both endpoints lie in ``scope`` (default: all
    nodes). Meta-edges are undirected pairs ``(min, max)``; ``witness_count``
    counts distinct witnessing graph edges and ``condition_mask`` ORs the
    ``COND_*`` bits of every condition that produced the pair. ``deadline``
    is an absolute ``time.monotonic()`` instant after which :class:`TimedOut`
    is raised.
    """
    resolver = resolver or ContextResolver(graph, model, store)
    in_scope = None if scope is None else set(scope)
    meta = Metagraph()
    if in_scope is None:
        nodes: Iterable[int] = graph.nodes()
    else:
        nodes = sorted(in_scope)
    for v in nodes:
        meta.contexts |= resolver.node(v)

    for e in graph.edges():
        if deadline is not None and e % 16 == 0 and time.monotonic() > deadline:
            raise TimedOut("metagraph construction exceeded the deadline")
        v1, v2 = graph.edge_src(e), graph.edge_dst(e)
        if in_scope is not None and (v1 not in in_scope or v2 not in in_scope):
            continue
        c_v1, c_v2, c_e = resolver.node(v1), resolver.node(v2), resolver.edge(e)
        meta.contexts |= c_e
        fired: dict[tuple[int, int], int] = {}
        for bit, left, right in ((COND_ENDPOINTS, c_v1, c_v2),
                                 (COND_EDGE_HEAD, c_e, c_v2),
                                 (COND_TAIL_EDGE, c_v1, c_e)):
            if not left or not right:
                continue
            for a in left:
                for b in right:
                    if a == b and not include_self_loops:
                        continue
                    pair = (a, b) if a <= b else (b, a)
                    fired[pair] = fired.get(pair, 0) | bit
        for pair, mask in fired.items():
            me = meta.meta_edges.get(pair)
            if me is None:
                meta.meta_edges[pair] = MetaEdge(pair[0], pair[1], 1, mask)
            else:
                me.witness_count += 1
                me.condition_mask |= mask
    return meta


@dataclass
class ContextHypergraph:
    vertices: set[int] = field(default_factory=set)
    hyperedges: list[tuple[int, frozenset[int]]] = field(default_factory=list)


def build_context_hypergraph(graph: Graph, model: ContextModel | None = None,
                             subgraph_nodes: Iterable[int] | None = None, *,
                             store: DictionaryStore | None = None,
                             resolver: ContextResolver | None = None) -> ContextHypergraph:
    """One hyperedge per context shared by members of ``subgraph_nodes``.

    The hyperedge of context ``c`` holds ``c`` and every member ``v`` with
    ``c in con(v)``. Vertices are the members plus their contexts.
    """
    resolver = resolver or ContextResolver(graph, model, store)
    members = sorted(graph.nodes() if subgraph_nodes is None else set(subgraph_nodes))
    bearers: dict[int, list[int]] = {}
    for v in members:
        for c in resolver.node(v):
            bearers.setdefault(c, []).append(v)
    hyper = ContextHypergraph(vertices=set(members) | set(bearers))
    for c in sorted(bearers):
        hyper.hyperedges.append((c, frozenset(bearers[c]) | {c}))
    return hyper


def enrich_graph(graph: Graph, model: ContextModel | None = None, *,
                 store: DictionaryStore | None = None,
                 subgraph_nodes: Iterable[int] | None = None,
                 deadline: float | None = None) -> tuple[Graph, int]:
    """Materialise shared contexts as ``sharesContext`` edges, in place.

    Every pair of distinct non-context members of a hyperedge gets one edge
    (lower id -> higher id) whose ``context`` attribute is the external id of
    the context node. Existing ``sharesContext`` edges with the same context
    are not duplicated, so a second run adds nothing. Past ``deadline`` (a
    ``time.monotonic()`` instant) :class:`TimedOut` is raised; edges added so
    far remain.
    """
    model = model or ContextModel()
    if model.context_universe != "E":
        raise ValueError("enrichment requires the context universe to be the entity set")
    hyper = build_context_hypergraph(graph, model, subgraph_nodes, store=store)
    existing = set()
    for v in graph.nodes():
        for e in graph.typed_out(v, SHARES_CONTEXT):
            ctx = graph.edge_attrs(e).get("context")
            if isinstance(ctx, Code) and store is not None:
                ctx = store.decode_code(ctx)
            w = graph.edge_dst(e)
            existing.add((min(v, w), max(v, w), ctx))
    added = 0
    for c, group in hyper.hyperedges:
        if deadline is not None and time.monotonic() > deadline:
            raise TimedOut("enrichment exceeded the deadline")
        label = graph.external_id(c) or str(c)
        others = sorted(group - {c})
        for i, u in enumerate(others):
            for w in others[i + 1:]:
                key = (u, w, label)
                if key in existing:
                    continue
                graph.add_edge(u, w, SHARES_CONTEXT, {"context": label})
                existing.add(key)
                added += 1
    return graph, added

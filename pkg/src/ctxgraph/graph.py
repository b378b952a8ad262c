"""In-memory labeled property multigraph.

Nodes and edges are addressed by dense integer ids allocated in insertion
order. Every node carries a non-empty label set and an attribute map; every
edge is directed, carries a type string and an attribute map. Parallel edges
are allowed, so an edge id is the only way to identify one relationship
instance.

Attribute values are plain Python objects:

* ``str`` for text,
* ``int`` for 64-bit integers,
* ``datetime.date`` for calendar dates,
* ``tuple`` of ``str`` for text lists,
* :class:`Code` for dictionary-encoded strings.
"""

from __future__ import annotations

import datetime as _dt
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, Union

from .errors import EmptyLabelSet, UnknownEdge, UnknownNode

NodeId = int
EdgeId = int

DIRECTIONS = ("out", "in", "both")
COMPARATORS = ("equals", "contains", "less", "greater")

#: Keys indexed by default; ingest registers them for every label that uses them.
DEFAULT_INDEXED_KEYS = ("documentID", "preferredLabel", "source", "surname", "forename")


@dataclass(frozen=True, order=True)
class Code:
    """A dictionary-encoded string: the namespace it lives in and its integer code."""

    namespace: str
    code: int

    def __repr__(self):
        return f"Code({self.namespace!r}, {self.code})"


AttributeValue = Union[str, int, _dt.date, tuple, Code]


@dataclass
class Node:
    id: NodeId
    labels: frozenset[str]
    attributes: dict[str, Any]
    external_id: str | None = None


@dataclass
class Edge:
    id: EdgeId
    src: NodeId
    dst: NodeId
    type: str
    attributes: dict[str, Any] = field(default_factory=dict)


def check_value(value):
    """Validate one attribute value and normalise lists to tuples."""
    if isinstance(value, bool):
        raise TypeError("booleans are not attribute values")
    if isinstance(value, (str, Code, _dt.date)):
        return value
    if isinstance(value, int):
        if not -(2**63) <= value < 2**63:
            raise OverflowError(f"integer attribute out of 64-bit range: {value}")
        return value
    if isinstance(value, (list, tuple)):
        if not all(isinstance(v, str) for v in value):
            raise TypeError("text lists may only contain strings")
        return tuple(value)
    raise TypeError(f"unsupported attribute value {value!r}")


def compare(stored, comparator, value, decode=None):
    """Apply one find-style comparator to a stored attribute value.

    ``decode`` turns a :class:`Code` back into its string; without it codes
    only compare equal to identical codes.
    """
    if stored is None:
        return False
    if isinstance(stored, Code) and not isinstance(value, Code):
        if decode is None:
            return False
        stored = decode(stored)
    elif isinstance(stored, tuple) and comparator != "contains" and decode is not None:
        stored = tuple(decode(s) if isinstance(s, Code) else s for s in stored)
    if isinstance(stored, _dt.date) and isinstance(value, str):
        try:
            value = _dt.date.fromisoformat(value)
        except ValueError:
            return False
    if comparator == "equals":
        return stored == value
    if comparator == "contains":
        if isinstance(stored, tuple):
            return value in stored
        if isinstance(stored, str) and isinstance(value, str):
            return value in stored
        return False
    try:
        if comparator == "less":
            return stored < value
        if comparator == "greater":
            return stored > value
    except TypeError:
        return False
    raise ValueError(f"unknown comparator {comparator!r}")


class Graph:
    """Mutable labeled property multigraph with label and attribute indexes.

    Mutation is single-writer; once loading is finished every read method is
    safe to call from several threads.
    """

    def __init__(self):
        self._labels: list[frozenset[str]] = []
        self._nattrs: list[dict[str, Any]] = []
        self._external: list[str | None] = []
        self._src: list[int] = []
        self._dst: list[int] = []
        self._etype: list[str] = []
        self._eattrs: list[dict[str, Any]] = []
        self._out: list[list[int]] = []
        self._in: list[list[int]] = []
        self._out_typed: list[dict[str, list[int]]] = []
        self._in_typed: list[dict[str, list[int]]] = []
        self._label_index: dict[str, list[int]] = {}
        self._type_count: dict[str, int] = {}
        self._attr_index: dict[tuple[str, str], dict[Any, list[int]]] = {}
        self._by_external: dict[str, int] = {}
        #: original node id for every node of a derived graph (induced subgraphs)
        self.origin: list[int] | None = None

    # -- construction -----------------------------------------------------

    def add_node(self, labels: Iterable[str], attributes: Mapping[str, Any] | None = None,
                 external_id: str | None = None) -> NodeId:
        labels = frozenset(labels)
        if not labels:
            raise EmptyLabelSet("a node needs at least one label")
        attrs = {k: check_value(v) for k, v in (attributes or {}).items()}
        nid = len(self._labels)
        self._labels.append(labels)
        self._nattrs.append(attrs)
        self._external.append(external_id)
        self._out.append([])
        self._in.append([])
        self._out_typed.append({})
        self._in_typed.append({})
        for label in labels:
            self._label_index.setdefault(label, []).append(nid)
            for key, value in attrs.items():
                index = self._attr_index.get((label, key))
                if index is not None:
                    index.setdefault(value, []).append(nid)
        if external_id is not None:
            self._by_external.setdefault(external_id, nid)
        return nid

    def add_edge(self, src: NodeId, dst: NodeId, type: str,
                 attributes: Mapping[str, Any] | None = None) -> EdgeId:
        self._require_node(src)
        self._require_node(dst)
        if not type:
            raise ValueError("edge type must be non-empty")
        eid = len(self._src)
        self._src.append(src)
        self._dst.append(dst)
        self._etype.append(type)
        self._eattrs.append({k: check_value(v) for k, v in (attributes or {}).items()})
        self._out[src].append(eid)
        self._in[dst].append(eid)
        self._out_typed[src].setdefault(type, []).append(eid)
        self._in_typed[dst].setdefault(type, []).append(eid)
        self._type_count[type] = self._type_count.get(type, 0) + 1
        return eid

    def set_node_attribute(self, node: NodeId, key: str, value) -> None:
        self._require_node(node)
        value = check_value(value)
        attrs = self._nattrs[node]
        old = attrs.get(key)
        for label in self._labels[node]:
            index = self._attr_index.get((label, key))
            if index is None:
                continue
            if key in attrs:
                bucket = index[old]
                bucket.remove(node)
                if not bucket:
                    del index[old]
            bucket = index.setdefault(value, [])
            bucket.append(node)
            bucket.sort()
        attrs[key] = value

    def set_edge_attribute(self, edge: EdgeId, key: str, value) -> None:
        self._require_edge(edge)
        self._eattrs[edge][key] = check_value(value)

    def register_index(self, label: str, key: str) -> None:
        """Index ``(label, key)`` so equality lookups avoid a label scan."""
        if (label, key) in self._attr_index:
            return
        index: dict[Any, list[int]] = {}
        for nid in self._label_index.get(label, ()):
            value = self._nattrs[nid].get(key)
            if value is not None:
                index.setdefault(value, []).append(nid)
        self._attr_index[(label, key)] = index

    # -- element access ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def edge_count(self) -> int:
        return len(self._src)

    def has_node(self, node) -> bool:
        return isinstance(node, int) and 0 <= node < len(self._labels)

    def has_edge(self, edge) -> bool:
        return isinstance(edge, int) and 0 <= edge < len(self._src)

    def node(self, node: NodeId) -> Node:
        self._require_node(node)
        return Node(node, self._labels[node], dict(self._nattrs[node]), self._external[node])

    def edge(self, edge: EdgeId) -> Edge:
        self._require_edge(edge)
        return Edge(edge, self._src[edge], self._dst[edge], self._etype[edge],
                    dict(self._eattrs[edge]))

    def labels(self, node: NodeId) -> frozenset[str]:
        return self._labels[node]

    def node_attrs(self, node: NodeId) -> Mapping[str, Any]:
        """The live attribute map of ``node``; do not mutate it directly."""
        return self._nattrs[node]

    def external_id(self, node: NodeId) -> str | None:
        return self._external[node]

    def node_by_external_id(self, external_id: str) -> NodeId | None:
        return self._by_external.get(external_id)

    def edge_src(self, edge: EdgeId) -> NodeId:
        return self._src[edge]

    def edge_dst(self, edge: EdgeId) -> NodeId:
        return self._dst[edge]

    def edge_type(self, edge: EdgeId) -> str:
        return self._etype[edge]

    def edge_attrs(self, edge: EdgeId) -> Mapping[str, Any]:
        return self._eattrs[edge]

    def nodes(self) -> range:
        return range(len(self._labels))

    def edges(self) -> range:
        return range(len(self._src))

    def nodes_with_label(self, label: str) -> list[NodeId]:
        return self._label_index.get(label, [])

    def label_counts(self) -> dict[str, int]:
        return {label: len(ids) for label, ids in sorted(self._label_index.items())}

    def type_counts(self) -> dict[str, int]:
        return dict(sorted(self._type_count.items()))

    def edge_types(self) -> set[str]:
        return set(self._type_count)

    def indexed_keys(self) -> list[tuple[str, str]]:
        return sorted(self._attr_index)

    def index_lookup(self, label: str, key: str, value) -> list[NodeId] | None:
        """Nodes whose stored ``key`` equals ``value``; ``None`` if not indexed."""
        index = self._attr_index.get((label, key))
        if index is None:
            return None
        return index.get(value, [])

    def index_values(self, label: str, key: str):
        index = self._attr_index.get((label, key))
        return None if index is None else index.keys()

    # -- adjacency --------------------------------------------------------

    def incident_edges(self, node: NodeId, direction: str = "out",
                       types: Iterable[str] | None = None) -> list[EdgeId]:
        """Incident edge ids ordered by id."""
        self._require_node(node)
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if types is None:
            if direction == "out":
                return list(self._out[node])
            if direction == "in":
                return list(self._in[node])
            return _merge(self._out[node], self._in[node])
        lists = []
        for t in types:
            if direction in ("out", "both"):
                lst = self._out_typed[node].get(t)
                if lst:
                    lists.append(lst)
            if direction in ("in", "both"):
                lst = self._in_typed[node].get(t)
                if lst:
                    lists.append(lst)
        if not lists:
            return []
        if len(lists) == 1:
            return list(lists[0])
        return sorted({e for lst in lists for e in lst})

    def typed_out(self, node: NodeId, type: str) -> list[EdgeId]:
        """Outgoing edges of one type; the live list, do not mutate."""
        return self._out_typed[node].get(type, _EMPTY)

    def typed_in(self, node: NodeId, type: str) -> list[EdgeId]:
        return self._in_typed[node].get(type, _EMPTY)

    def out_edges(self, node: NodeId) -> list[EdgeId]:
        return self._out[node]

    def in_edges(self, node: NodeId) -> list[EdgeId]:
        return self._in[node]

    def neighbors(self, node: NodeId, direction: str = "out",
                  type_filter: Iterable[str] | None = None) -> list[tuple[EdgeId, NodeId]]:
        """``(edge, other endpoint)`` pairs for matching incident edges, by edge id.

        A self-loop appears once per incident direction it matches.
        """
        self._require_node(node)
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        types = None if type_filter is None else list(type_filter)
        out = []
        if direction in ("out", "both"):
            for e in self.incident_edges(node, "out", types):
                out.append((e, self._dst[e]))
        if direction in ("in", "both"):
            for e in self.incident_edges(node, "in", types):
                out.append((e, self._src[e]))
        out.sort(key=lambda pair: pair[0])
        return out

    def degree(self, node: NodeId, direction: str = "both",
               types: Iterable[str] | None = None) -> int:
        if types is None:
            n = 0
            if direction in ("out", "both"):
                n += len(self._out[node])
            if direction in ("in", "both"):
                n += len(self._in[node])
            return n
        n = 0
        for t in types:
            if direction in ("out", "both"):
                n += len(self._out_typed[node].get(t, _EMPTY))
            if direction in ("in", "both"):
                n += len(self._in_typed[node].get(t, _EMPTY))
        return n

    # -- derived graphs and lookups ----------------------------------------

    def induced_subgraph(self, node_set: Iterable[NodeId]) -> Graph:
        """Subgraph on ``node_set`` with every edge whose endpoints both lie inside.

        New ids follow ascending original ids; ``result.origin[new] == old``.
        """
        chosen = sorted(set(node_set))
        for n in chosen:
            self._require_node(n)
        sub = Graph()
        for label, key in self._attr_index:
            sub._attr_index[(label, key)] = {}
        remap = {}
        for old in chosen:
            remap[old] = sub.add_node(self._labels[old], self._nattrs[old], self._external[old])
        for e in range(len(self._src)):
            s, d = self._src[e], self._dst[e]
            if s in remap and d in remap:
                sub.add_edge(remap[s], remap[d], self._etype[e], self._eattrs[e])
        sub.origin = [self.origin[o] if self.origin is not None else o for o in chosen]
        return sub

    def find_nodes(self, label: str, predicates: Iterable[tuple[str, str, Any]] = (),
                   *, use_index: bool = True,
                   decode: Callable[[Code], str] | None = None) -> list[NodeId]:
        """Nodes labeled ``label`` satisfying every ``(key, comparator, value)``.

        Equality predicates on registered keys are served from the attribute
        index; everything else scans the label.
        """
        predicates = list(predicates)
        for _, comparator, _ in predicates:
            if comparator not in COMPARATORS:
                raise ValueError(f"comparator must be one of {COMPARATORS}")
        candidates = self._label_index.get(label)
        if candidates is None:
            return []
        if use_index:
            for key, comparator, value in predicates:
                if comparator != "equals" or (label, key) not in self._attr_index:
                    continue
                index = self._attr_index[(label, key)]
                hits = index.get(value)
                if hits is None and decode is not None and isinstance(value, str):
                    hits = sorted({n for stored, ids in index.items()
                                   if isinstance(stored, Code) and decode(stored) == value
                                   for n in ids})
                candidates = hits or []
                break
        return [n for n in candidates
                if all(compare(self._nattrs[n].get(k), c, v, decode) for k, c, v in predicates)]

    def copy(self) -> Graph:
        """Independent copy; attribute maps are copied, values are shared."""
        g = Graph()
        g._labels = list(self._labels)
        g._nattrs = [dict(a) for a in self._nattrs]
        g._external = list(self._external)
        g._src = list(self._src)
        g._dst = list(self._dst)
        g._etype = list(self._etype)
        g._eattrs = [dict(a) for a in self._eattrs]
        g._out = [list(x) for x in self._out]
        g._in = [list(x) for x in self._in]
        g._out_typed = [{t: list(v) for t, v in d.items()} for d in self._out_typed]
        g._in_typed = [{t: list(v) for t, v in d.items()} for d in self._in_typed]
        g._label_index = {k: list(v) for k, v in self._label_index.items()}
        g._type_count = dict(self._type_count)
        g._attr_index = {k: {v: list(ids) for v, ids in idx.items()}
                         for k, idx in self._attr_index.items()}
        g._by_external = dict(self._by_external)
        g.origin = None if self.origin is None else list(self.origin)
        return g

    def replace_attributes(self, node_attrs: list[dict], edge_attrs: list[dict]) -> Graph:
        """Same topology and labels with new attribute maps; indexes rebuilt."""
        if len(node_attrs) != self.node_count or len(edge_attrs) != self.edge_count:
            raise ValueError("attribute lists must cover every node and edge")
        g = Graph()
        for label, key in self._attr_index:
            g._attr_index[(label, key)] = {}
        for n in range(self.node_count):
            g.add_node(self._labels[n], node_attrs[n], self._external[n])
        for e in range(self.edge_count):
            g.add_edge(self._src[e], self._dst[e], self._etype[e], edge_attrs[e])
        g.origin = None if self.origin is None else list(self.origin)
        return g

    def __repr__(self):
        return f"<Graph nodes={self.node_count} edges={self.edge_count}>"

    def _require_node(self, node):
        if not self.has_node(node):
            raise UnknownNode(node)

    def _require_edge(self, edge):
        if not self.has_edge(edge):
            raise UnknownEdge(edge)


_EMPTY: list[int] = []


def _merge(a: list[int], b: list[int]) -> list[int]:
    if not a:
        return list(b)
    if not b:
        return list(a)
    return sorted(a + b)

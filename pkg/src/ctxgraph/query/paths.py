"""Regular path queries and shortest paths.

RPQ evaluation walks the product of the graph and a path-regex automaton,
one BFS layer per hop, so hop bounds are exact: a pair ``(u, v)`` is
reported iff some walk of ``min_hops..max_hops`` edges from ``u`` to ``v``
spells a word of the regex language. Walks may repeat nodes and edges.
"""

from __future__ import annotations

import time
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass

from ..errors import TimedOut, UnknownNode
from ..graph import Graph
from .regex import Automaton, Sym, parse_regex

DEFAULT_HOP_BOUND = 8


@dataclass(frozen=True, order=True)
class Path:
    """Alternating node and edge ids, starting and ending with a node."""

    ids: tuple[int, ...]

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.ids[::2]

    @property
    def edges(self) -> tuple[int, ...]:
        return self.ids[1::2]

    def __len__(self):
        return len(self.ids) // 2

    def reversed(self) -> Path:
        return Path(self.ids[::-1])

    def then(self, other: Path) -> Path:
        if self.ids[-1] != other.ids[0]:
            raise ValueError("paths do not share the joining node")
        return Path(self.ids + other.ids[1:])

    def is_valid(self, graph: Graph) -> bool:
        if len(self.ids) % 2 != 1:
            return False
        for i in range(1, len(self.ids), 2):
            a, e, b = self.ids[i - 1], self.ids[i], self.ids[i + 1]
            s, d = graph.edge_src(e), graph.edge_dst(e)
            if (s, d) != (a, b) and (d, s) != (a, b):
                return False
        return True


def steps(graph: Graph, node: int, sym: Sym):
    """``(edge, neighbour, direction)`` for every edge step matching ``sym``."""
    if sym.dir in ("out", "both"):
        edges = graph.out_edges(node) if sym.type is None else graph.typed_out(node, sym.type)
        for e in edges:
            yield e, graph.edge_dst(e)
    if sym.dir in ("in", "both"):
        edges = graph.in_edges(node) if sym.type is None else graph.typed_in(node, sym.type)
        for e in edges:
            s = graph.edge_src(e)
            if sym.dir == "both" and s == node and graph.edge_dst(e) == node:
                continue  # undirected self-loop already yielded
            yield e, s


class RPQSearch:
    """Reachability from one source over the graph x automaton product."""

    def __init__(self, graph: Graph, automaton: Automaton, min_hops: int = 0,
                 max_hops: int = DEFAULT_HOP_BOUND, deadline: float | None = None):
        if min_hops < 0 or max_hops < min_hops:
            raise ValueError(f"bad hop bounds {min_hops}..{max_hops}")
        self.graph = graph
        self.automaton = automaton
        self.min_hops = min_hops
        self.max_hops = max_hops
        self.deadline = deadline

    def run(self, source: int, want_paths: bool = True) -> dict[int, Path | None]:
        """Reachable targets mapped to a shortest accepting walk (or ``None``)."""
        g, aut = self.graph, self.automaton
        found: dict[int, Path | None] = {}
        # parent[(node, state, layer)] -> (prev key, edge)
        parent: dict = {}
        frontier = [(source, aut.start)]
        settled = set()
        if self.min_hops == 0:
            settled.update(frontier)
        start_key = (source, aut.start, 0)
        parent[start_key] = None
        ticks = 0
        for layer in range(self.max_hops + 1):
            for node, state in frontier:
                if layer >= self.min_hops and aut.accepting[state] and node not in found:
                    found[node] = self._trace(parent, (node, state, layer)) if want_paths else None
            if layer == self.max_hops:
                break
            nxt = []
            seen_layer = set()
            for node, state in frontier:
                key = (node, state, layer)
                for sym, target in aut.moves[state]:
                    for e, other in steps(g, node, sym):
                        item = (other, target)
                        if item in seen_layer or item in settled:
                            continue
                        seen_layer.add(item)
                        nxt.append(item)
                        if want_paths:
                            parent[(other, target, layer + 1)] = (key, e)
                ticks += 1
                if self.deadline is not None and ticks % 512 == 1 and time.monotonic() > self.deadline:
                    raise TimedOut("path search exceeded the deadline")
            if layer + 1 >= self.min_hops:
                settled.update(nxt)
            frontier = nxt
            if not frontier:
                break
        return found

    @staticmethod
    def _trace(parent, key):
        ids = [key[0]]
        while parent[key] is not None:
            prev, e = parent[key]
            ids.append(e)
            ids.append(prev[0])
            key = prev
        return Path(tuple(reversed(ids)))


def eval_rpq(graph: Graph, src_set: Iterable[int] | None, dst_set: Iterable[int] | None,
             regex, *, min_hops: int = 0, max_hops: int = DEFAULT_HOP_BOUND,
             witness: bool = False, deadline: float | None = None):
    """All ``(u, v)`` with ``u`` in ``src_set`` and ``v`` in ``dst_set`` linked by the regex.

    ``regex`` is a regex AST or text; ``None`` for a node set means every
    node. With ``witness=True`` a dict maps each pair to a shortest walk.
    """
    if isinstance(regex, str):
        regex = parse_regex(regex)
    automaton = regex if isinstance(regex, Automaton) else Automaton(regex)
    search = RPQSearch(graph, automaton, min_hops, max_hops, deadline)
    sources = graph.nodes() if src_set is None else sorted(set(src_set))
    targets = None if dst_set is None else set(dst_set)
    result = {}
    for u in sources:
        if not graph.has_node(u):
            raise UnknownNode(u)
        for v, path in search.run(u, want_paths=witness).items():
            if targets is None or v in targets:
                result[(u, v)] = path
    return result if witness else set(result)


def shortest_path(graph: Graph, u: int, v: int, allowed_types: Iterable[str] | None = None,
                  direction: str = "directed", deadline: float | None = None) -> Path | None:
    """Minimum-hop path from ``u`` to ``v``; ties go to the lexicographically
    smallest node sequence (then edge ids). ``None`` when unreachable."""
    for n in (u, v):
        if not graph.has_node(n):
            raise UnknownNode(n)
    if direction not in ("directed", "undirected"):
        raise ValueError("direction must be 'directed' or 'undirected'")
    types = None if allowed_types is None else sorted(set(allowed_types))
    way = "out" if direction == "directed" else "both"

    def nbrs(node):
        best: dict[int, int] = {}
        for e, w in graph.neighbors(node, way, types):
            if w not in best:
                best[w] = e
        return best

    if u == v:
        return Path((u,))
    # distances from v backwards, so the forward walk can pick the smallest
    # next node that still lies on a shortest path
    back_way = "in" if direction == "directed" else "both"
    dist = {v: 0}
    queue = deque([v])
    ticks = 0
    while queue and u not in dist:
        x = queue.popleft()
        for _, w in graph.neighbors(x, back_way, types):
            if w not in dist:
                dist[w] = dist[x] + 1
                queue.append(w)
        ticks += 1
        if deadline is not None and ticks % 512 == 1 and time.monotonic() > deadline:
            raise TimedOut("shortest path exceeded the deadline")
    if u not in dist:
        return None
    ids = [u]
    node = u
    while node != v:
        options = nbrs(node)
        nxt = min(w for w in options if dist.get(w) == dist[node] - 1)
        ids += [options[nxt], nxt]
        node = nxt
    return Path(tuple(ids))

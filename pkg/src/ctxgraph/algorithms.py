"""Global graph analytics over projections: PageRank, degree, betweenness,
components and Louvain communities."""

from __future__ import annotations

import random
from collections import defaultdict, deque
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, EmptyProjection
from .graph import Graph

DEFAULT_NODE_BUDGET = 200_000
MOVE_EPS = 1e-9

ScoreMap = dict[int, float]


@dataclass(frozen=True)
class Projection:
    """A node set plus (src, dst) edge pairs drawn from a graph.

    Parallel pairs are kept; each one is an edge of weight 1. When
    ``directed`` is false every pair is read as an undirected edge.
    """

    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()
    directed: bool = True

    def __post_init__(self):
        members = set(self.nodes)
        for u, v in self.edges:
            if u not in members or v not in members:
                raise ValueError(f"edge ({u}, {v}) leaves the projected node set")

    @classmethod
    def from_graph(cls, graph: Graph, *, label: str | None = None,
                   predicates: Iterable = (), node_set: Iterable[int] | None = None,
                   edge_types: Iterable[str] | None = None, direction: str = "directed",
                   edge_pairs: Iterable[tuple[int, int]] | None = None) -> Projection:
        """Build a projection.

        Nodes come from ``node_set`` or a label/predicate filter (all nodes
        when neither is given). Edges are either the graph edges of
        ``edge_types`` with both ends inside the node set, or explicit
        ``edge_pairs`` (a bipartite rule such as entity-document annotation
        pairs), whose endpoints are added to the node set.
        """
        if direction not in ("directed", "undirected"):
            raise ValueError("direction must be 'directed' or 'undirected'")
        if node_set is not None:
            nodes = set(node_set)
        elif label is not None:
            nodes = set(graph.find_nodes(label, list(predicates)))
        else:
            nodes = set(graph.nodes())
        if edge_pairs is not None:
            pairs = [(int(u), int(v)) for u, v in edge_pairs]
            for u, v in pairs:
                nodes.add(u)
                nodes.add(v)
        else:
            types = None if edge_types is None else set(edge_types)
            pairs = []
            for e in graph.edges():
                if types is not None and graph.edge_type(e) not in types:
                    continue
                u, v = graph.edge_src(e), graph.edge_dst(e)
                if u in nodes and v in nodes:
                    pairs.append((u, v))
        return cls(tuple(sorted(nodes)), tuple(pairs), direction == "directed")

    def index(self) -> dict[int, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    def simple_adjacency(self) -> list[set[int]]:
        """Neighbour index sets without loops or parallel edges."""
        idx = self.index()
        adj = [set() for _ in self.nodes]
        for u, v in self.edges:
            if u == v:
                continue
            adj[idx[u]].add(idx[v])
            if not self.directed:
                adj[idx[v]].add(idx[u])
        return adj


@dataclass
class Partition:
    """Node -> community id, with community id = smallest member node id."""

    assignment: dict[int, int]
    modularity: float | None = None
    pass_modularities: list[float] = field(default_factory=list)

    def communities(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = defaultdict(list)
        for n in sorted(self.assignment):
            out[self.assignment[n]].append(n)
        return dict(out)

    def __len__(self):
        return len(set(self.assignment.values()))


def _canonical(assignment: dict[int, object]) -> dict[int, int]:
    smallest: dict[object, int] = {}
    for n in sorted(assignment):
        smallest.setdefault(assignment[n], n)
    return {n: smallest[c] for n, c in assignment.items()}


# -- PageRank ---------------------------------------------------------------------

def pagerank(graph: Graph | None, projection: Projection, damping: float = 0.85,
             max_iter: int = 100, tol: float = 1e-8) -> ScoreMap:
    """Power iteration with uniform teleport and uniform dangling redistribution.

    Undirected projections contribute each edge in both directions.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    n = len(projection.nodes)
    if n == 0:
        raise EmptyProjection("pagerank needs at least one node")
    idx = projection.index()
    src = [idx[u] for u, _ in projection.edges]
    dst = [idx[v] for _, v in projection.edges]
    if not projection.directed:
        src, dst = src + dst, dst + src
    src_a = np.asarray(src, dtype=np.int64)
    dst_a = np.asarray(dst, dtype=np.int64)
    out_w = np.bincount(src_a, minlength=n).astype(float)
    dangling = out_w == 0
    share = np.zeros(len(src_a))
    if len(src_a):
        share = 1.0 / out_w[src_a]
    rank = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        flow = np.bincount(dst_a, weights=rank[src_a] * share, minlength=n)
        new = damping * (flow + rank[dangling].sum() / n) + (1.0 - damping) / n
        new /= new.sum()
        delta = np.abs(new - rank).sum()
        rank = new
        if delta < tol:
            break
    return {node: float(rank[i]) for i, node in enumerate(projection.nodes)}


# -- degree -------------------------------------------------------------------------

def degree_centrality(graph: Graph | None, projection: Projection, mode: str = "both") -> ScoreMap:
    """Count of projected edges incident to each node.

    ``mode`` selects "in", "out" or "both" on directed projections; a
    self-loop counts once. Undirected projections always count each incident
    edge once.
    """
    if not projection.nodes:
        raise EmptyProjection("degree centrality needs at least one node")
    if mode not in ("in", "out", "both"):
        raise ValueError("mode must be 'in', 'out' or 'both'")
    if not projection.directed:
        mode = "both"
    scores = dict.fromkeys(projection.nodes, 0.0)
    for u, v in projection.edges:
        if mode in ("out", "both"):
            scores[u] += 1
        if mode == "in" or (mode == "both" and u != v):
            scores[v] += 1
    return scores


# -- betweenness ------------------------------------------------------------------

def betweenness_centrality(graph: Graph | None, projection: Projection,
                           normalized: bool = False,
                           budget: int = DEFAULT_NODE_BUDGET) -> ScoreMap:
    """Exact Brandes betweenness over unit-weight shortest paths.

    Loops and parallel edges are ignored. Undirected scores count each
    unordered pair once.
    """
    n = len(projection.nodes)
    if n > budget:
        raise BudgetExceeded(f"projection has {n} nodes, budget is {budget}")
    adj = [sorted(s) for s in projection.simple_adjacency()]
    bc = [0.0] * n
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    if not projection.directed:
        bc = [b / 2.0 for b in bc]
    if normalized and n > 2:
        pairs = (n - 1) * (n - 2)
        if not projection.directed:
            pairs /= 2
        bc = [b / pairs for b in bc]
    return {node: bc[i] for i, node in enumerate(projection.nodes)}


# -- components ----------------------------------------------------------------------

def connected_components(graph: Graph | None, projection: Projection,
                         strong: bool = False) -> Partition:
    """Weak components by union-find, or strong components (Tarjan) when asked."""
    if strong and projection.directed:
        return Partition(_canonical(_tarjan(projection)))
    parent = {n: n for n in projection.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in projection.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    return Partition(_canonical({n: find(n) for n in projection.nodes}))


def _tarjan(projection: Projection) -> dict[int, int]:
    adj = projection.simple_adjacency()
    n = len(adj)
    succ = [sorted(s) for s in adj]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            while i < len(succ[v]):
                w = succ[v][i]
                i += 1
                if index[w] < 0:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = v
                    if w == v:
                        break
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return {node: comp[i] for i, node in enumerate(projection.nodes)}


# -- Louvain -----------------------------------------------------------------------

def _weights(projection: Projection) -> tuple[int, dict[tuple[int, int], float]]:
    """Undirected weight map over index pairs ``(i <= j)``."""
    idx = projection.index()
    w: dict[tuple[int, int], float] = defaultdict(float)
    for u, v in projection.edges:
        a, b = idx[u], idx[v]
        w[(min(a, b), max(a, b))] += 1.0
    return len(projection.nodes), dict(w)


def _modularity(n: int, weights: dict[tuple[int, int], float], community: list[int]) -> float:
    m = sum(weights.values())
    if m == 0:
        return 0.0
    inside: dict[int, float] = defaultdict(float)
    total: dict[int, float] = defaultdict(float)
    for (a, b), w in weights.items():
        total[community[a]] += w
        total[community[b]] += w
        if community[a] == community[b]:
            inside[community[a]] += w
    return sum(inside[c] / m - (total[c] / (2 * m)) ** 2 for c in total)


def modularity(projection: Projection, partition: Partition | dict[int, int]) -> float:
    """Newman modularity of a partition on the projection read as undirected.

    Loops count twice towards degree and once towards internal weight.
    """
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    n, weights = _weights(projection)
    community = [assignment[node] for node in projection.nodes]
    return _modularity(n, weights, community)


def louvain(graph: Graph | None, projection: Projection, max_passes: int = 10,
            seed: int = 0) -> Partition:
    """Two-phase Louvain with a seeded node visiting order."""
    rng = random.Random(seed)
    n, weights = _weights(projection)
    # members[i] = original node indices folded into super-node i
    members = [[i] for i in range(n)]
    final = list(range(n))
    history: list[float] = []
    cur_n, cur_w = n, weights
    for _ in range(max_passes):
        community, moved = _local_moves(cur_n, cur_w, rng)
        if not moved:
            break
        relabel: dict[int, int] = {}
        for c in community:
            relabel.setdefault(c, len(relabel))
        for i in range(cur_n):
            for orig in members[i]:
                final[orig] = relabel[community[i]]
        history.append(_modularity(n, weights, final))
        new_members: list[list[int]] = [[] for _ in relabel]
        for i in range(cur_n):
            new_members[relabel[community[i]]].extend(members[i])
        agg: dict[tuple[int, int], float] = defaultdict(float)
        for (a, b), w in cur_w.items():
            ca, cb = relabel[community[a]], relabel[community[b]]
            agg[(min(ca, cb), max(ca, cb))] += w
        members, cur_n, cur_w = new_members, len(relabel), dict(agg)
    q = _modularity(n, weights, final)
    assignment = _canonical({node: final[i] for i, node in enumerate(projection.nodes)})
    return Partition(assignment, q, history)


def _local_moves(n: int, weights: dict[tuple[int, int], float], rng: random.Random):
    m = sum(weights.values())
    community = list(range(n))
    if m == 0:
        return community, False
    nbrs: list[dict[int, float]] = [defaultdict(float) for _ in range(n)]
    degree = [0.0] * n
    for (a, b), w in weights.items():
        degree[a] += w
        degree[b] += w
        if a != b:
            nbrs[a][b] += w
            nbrs[b][a] += w
    tot = degree[:]
    order = list(range(n))
    rng.shuffle(order)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            own = community[i]
            k = degree[i]
            links: dict[int, float] = defaultdict(float)
            for j, w in nbrs[i].items():
                links[community[j]] += w
            tot[own] -= k

            def gain(c):
                return links.get(c, 0.0) / m - tot[c] * k / (2 * m * m)

            best, best_gain = own, gain(own)
            for c in sorted(links):
                g = gain(c)
                if g - best_gain > MOVE_EPS:
                    best, best_gain = c, g
            if best != own and best_gain - gain(own) <= MOVE_EPS:
                best = own
            tot[best] += k
            if best != own:
                community[i] = best
                improved = moved_any = True
    return community, moved_any

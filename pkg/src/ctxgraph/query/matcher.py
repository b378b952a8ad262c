"""Backtracking matcher for conjunctions of edge and path atoms.

Matching is homomorphic: distinct variables may bind the same node unless a
``!=`` condition says otherwise. At every level the matcher picks the
cheapest next step given the current partial binding: checking an atom whose
endpoints are both bound, expanding an atom from its bound endpoint (cost =
actual adjacency size), or seeding a fresh variable (cost = index or label
cardinality).
"""

from __future__ import annotations

import datetime as _dt
import time
from collections.abc import Iterable

from ..dictionary import FULL, DictionaryStore, LayoutConfig
from ..errors import DisconnectedPattern, TimedOut
from ..graph import Code, Graph
from .ast import Bindings, Condition, Count, Literal, NodeSpec, PathAtom, PatternAtom, Prop, Var
from .paths import DEFAULT_HOP_BOUND, RPQSearch
from .regex import Automaton, reverse_regex

_PATH_COST = 1000   # unknown fan-out of a not-yet-run path search


class LayoutContext:
    """Everything evaluation needs to see through dictionary encoding."""

    def __init__(self, store: DictionaryStore | None = None, layout: LayoutConfig = FULL,
                 deadline_secs: float | None = 60.0, hop_bound: int = DEFAULT_HOP_BOUND,
                 seed: int = 0):
        self.store = store
        self.layout = layout
        self.deadline_secs = deadline_secs
        self.hop_bound = hop_bound
        self.seed = seed
        self._lookup_cache: dict[tuple[str, object], Code | None] = {}
        self._decode_cache: dict[Code, str] = {}
        namespaces: dict[str, list[str]] = {}
        for owner, key in sorted(layout.encoded_attrs):
            namespaces.setdefault(key, []).append(f"{owner}.{key}")
        self._key_namespaces = namespaces

    def deadline(self) -> float | None:
        if self.deadline_secs is None:
            return None
        return time.monotonic() + self.deadline_secs

    def decode(self, value):
        if isinstance(value, Code):
            hit = self._decode_cache.get(value)
            if hit is None:
                if self.store is None:
                    raise ValueError(f"cannot decode {value!r} without dictionaries")
                hit = self._decode_cache[value] = self.store.decode_code(value)
            return hit
        if isinstance(value, tuple) and any(isinstance(v, Code) for v in value):
            return tuple(self.decode(v) for v in value)
        return value

    def code_for(self, namespace: str, value) -> Code | None:
        key = (namespace, value)
        if key in self._lookup_cache:
            return self._lookup_cache[key]
        code = None
        if self.store is not None and isinstance(value, str):
            code = self.store.lookup(namespace, value)
        self._lookup_cache[key] = code
        return code

    def stored_forms(self, key: str, value) -> list:
        """Every representation ``value`` can take when stored under ``key``."""
        forms = [value]
        if isinstance(value, str):
            for ns in self._key_namespaces.get(key, ()):
                code = self.code_for(ns, value)
                if code is not None:
                    forms.append(code)
        return forms

    def equals(self, stored, plain) -> bool:
        """Compare a stored attribute with a plain (decoded) value."""
        if stored is None or plain is None:
            return False
        if isinstance(stored, Code):
            if isinstance(plain, Code):
                return stored == plain
            return self.code_for(stored.namespace, plain) == stored
        if isinstance(stored, _dt.date) and isinstance(plain, str):
            try:
                return stored == _dt.date.fromisoformat(plain)
            except ValueError:
                return False
        if isinstance(stored, tuple):
            return self.decode(stored) == plain
        return stored == plain


def attr_of(graph: Graph, binding: dict, roles: dict, var: str, key: str, ctx: LayoutContext):
    """Decoded attribute ``var.key`` of a bound node or edge (``None`` if absent)."""
    ident = binding[var]
    attrs = graph.node_attrs(ident) if roles[var] == "node" else graph.edge_attrs(ident)
    return ctx.decode(attrs.get(key))


def compare_values(left, op: str, right) -> bool:
    if op == "ISNULL":
        return left is None
    if op == "NOTNULL":
        return left is not None
    if left is None or right is None:
        return False
    if isinstance(left, _dt.date) and isinstance(right, str):
        right = _coerce_date(right)
    elif isinstance(right, _dt.date) and isinstance(left, str):
        left = _coerce_date(left)
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if op == "CONTAINS":
        if isinstance(left, (str, tuple)) and isinstance(right, str):
            return right in left
        return False
    try:
        if op == "<":
            return left < right
        if op == ">":
            return left > right
        if op == "<=":
            return left <= right
        if op == ">=":
            return left >= right
    except TypeError:
        return False
    raise ValueError(f"unknown operator {op!r}")


def _coerce_date(text):
    try:
        return _dt.date.fromisoformat(text)
    except ValueError:
        return text


class _Stop(Exception):
    pass


class PatternMatcher:
    def __init__(self, graph: Graph, atoms, nodes: dict[str, NodeSpec],
                 conditions: Iterable[Condition] = (), ctx: LayoutContext | None = None,
                 allow_disconnected: bool = False, max_rows: int | None = None):
        self.g = graph
        self.atoms = list(atoms)
        self.nodes = dict(nodes)
        for atom in self.atoms:
            self.nodes.setdefault(atom.src_var, NodeSpec())
            self.nodes.setdefault(atom.dst_var, NodeSpec())
        self.ctx = ctx or LayoutContext()
        self.max_rows = max_rows
        self.roles = {v: "node" for v in self.nodes}
        for atom in self.atoms:
            if isinstance(atom, PatternAtom):
                self.roles[atom.edge_var] = "edge"
            else:
                self.roles[atom.path_var] = "path"
        self.conditions = [(c, _cond_vars(c)) for c in conditions]
        for var in self.nodes:
            for _, value in self.nodes[var].props:
                if isinstance(value, Prop) and value.var == var:
                    raise ValueError(f"{var} cannot join on its own attribute")
        if not allow_disconnected:
            self._check_connected()
        self._static: dict[str, list[int]] = {}
        self._rpq_cache: dict[tuple[int, bool, int], dict] = {}
        self._automata: dict[tuple[int, bool], Automaton] = {}
        self._ticks = 0
        self._deadline = None

    # -- planning helpers -------------------------------------------------------

    def _check_connected(self):
        parent = {v: v for v in self.nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        for atom in self.atoms:
            union(atom.src_var, atom.dst_var)
        edge_owner = {a.edge_var: a.src_var for a in self.atoms if isinstance(a, PatternAtom)}
        for var, spec in self.nodes.items():
            for _, value in spec.props:
                if isinstance(value, Prop):
                    union(var, edge_owner.get(value.var, value.var))
        for atom in self.atoms:
            if isinstance(atom, PatternAtom):
                for _, value in atom.props:
                    if isinstance(value, Prop):
                        union(atom.src_var, edge_owner.get(value.var, value.var))
        roots = {find(v) for v in self.nodes}
        if len(roots) > 1:
            raise DisconnectedPattern(
                f"pattern splits into {len(roots)} unconnected parts; "
                "pass allow_disconnected=True to accept the cartesian product")

    def _literal_seed(self, var) -> list[int]:
        cached = self._static.get(var)
        if cached is not None:
            return cached
        spec = self.nodes[var]
        best = None
        for label in spec.labels:
            for key, value in spec.props:
                if not isinstance(value, Literal):
                    continue
                hits = self._index_hits(label, key, value.value)
                if hits is not None and (best is None or len(hits) < len(best)):
                    best = hits
            lst = self.g.nodes_with_label(label)
            if best is None or len(lst) < len(best):
                best = lst
        if best is None:
            best = self.g.nodes()
        self._static[var] = best
        return best

    def _index_hits(self, label, key, plain):
        forms = self.ctx.stored_forms(key, plain)
        result = None
        for form in forms:
            try:
                hits = self.g.index_lookup(label, key, form)
            except TypeError:   # unhashable
                return None
            if hits is None:
                return None
            if hits:
                result = hits if result is None else sorted(set(result) | set(hits))
        return result if result is not None else []

    def _seed(self, var, binding):
        """Candidate nodes for ``var`` and whether they came from a value join."""
        spec = self.nodes[var]
        for key, value in spec.props:
            if isinstance(value, Prop) and value.var in binding:
                plain = attr_of(self.g, binding, self.roles, value.var, value.key, self.ctx)
                if plain is None:
                    return []
                for label in spec.labels:
                    hits = self._index_hits(label, key, plain)
                    if hits is not None:
                        return hits
        return self._literal_seed(var)

    def node_ok(self, var, n, binding) -> bool:
        spec = self.nodes[var]
        g = self.g
        if spec.labels:
            labels = g.labels(n)
            for label in spec.labels:
                if label not in labels:
                    return False
        if spec.props:
            attrs = g.node_attrs(n)
            for key, value in spec.props:
                if isinstance(value, Literal):
                    if not self.ctx.equals(attrs.get(key), value.value):
                        return False
                elif value.var in binding:
                    plain = attr_of(g, binding, self.roles, value.var, value.key, self.ctx)
                    if not self.ctx.equals(attrs.get(key), plain):
                        return False
        return True

    def _node_refs_ready(self, var, binding):
        """Join props of ``var`` that became checkable after later bindings."""
        return all(not isinstance(v, Prop) or v.var in binding for _, v in self.nodes[var].props)

    def edge_ok(self, atom: PatternAtom, e, binding) -> bool:
        if not atom.props:
            return True
        attrs = self.g.edge_attrs(e)
        for key, value in atom.props:
            if isinstance(value, Literal):
                if not self.ctx.equals(attrs.get(key), value.value):
                    return False
            elif value.var in binding:
                plain = attr_of(self.g, binding, self.roles, value.var, value.key, self.ctx)
                if not self.ctx.equals(attrs.get(key), plain):
                    return False
        return True

    def _incident(self, node, types, direction):
        """``(edge, other)`` for edges at ``node`` leaving in ``direction``."""
        g = self.g
        if direction in ("out", "both"):
            lists = [g.out_edges(node)] if types is None else [g.typed_out(node, t) for t in types]
            for lst in lists:
                for e in lst:
                    yield e, g.edge_dst(e)
        if direction in ("in", "both"):
            lists = [g.in_edges(node)] if types is None else [g.typed_in(node, t) for t in types]
            for lst in lists:
                for e in lst:
                    s = g.edge_src(e)
                    if direction == "both" and s == node and g.edge_dst(e) == node:
                        continue
                    yield e, s

    def _fanout(self, node, types, direction) -> int:
        g = self.g
        if types is None:
            n = 0
            if direction in ("out", "both"):
                n += len(g.out_edges(node))
            if direction in ("in", "both"):
                n += len(g.in_edges(node))
            return n
        return g.degree(node, {"out": "out", "in": "in", "both": "both"}[direction], types)

    def _rpq(self, ai, from_src, node):
        key = (ai, from_src, node)
        hit = self._rpq_cache.get(key)
        if hit is None:
            atom = self.atoms[ai]
            aut = self._automata.get((ai, from_src))
            if aut is None:
                regex = atom.regex if from_src else reverse_regex(atom.regex)
                aut = self._automata[(ai, from_src)] = Automaton(regex)
            search = RPQSearch(self.g, aut, atom.min_hops, atom.max_hops, self._deadline)
            hit = self._rpq_cache[key] = search.run(node)
        return hit

    # -- search -----------------------------------------------------------------

    def run(self) -> Bindings:
        self._deadline = self.ctx.deadline()
        out = Bindings()
        try:
            self._search({}, set(range(len(self.atoms))), out.rows)
        except _Stop:
            pass
        return out

    def _tick(self):
        self._ticks += 1
        if self._deadline is not None and self._ticks & 2047 == 1 \
                and time.monotonic() > self._deadline:
            raise TimedOut("pattern evaluation exceeded the deadline")

    def _conditions_hold(self, binding, newly: Iterable[str]) -> bool:
        newly = set(newly)
        for cond, vars_ in self.conditions:
            if not (vars_ & newly) or not vars_ <= binding.keys():
                continue
            left = self._operand(cond.left, binding)
            right = self._operand(cond.right, binding) if cond.right is not None else None
            if not compare_values(left, cond.op, right):
                return False
        return True

    def _operand(self, expr, binding):
        if isinstance(expr, Literal):
            return expr.value
        if isinstance(expr, Var):
            return binding[expr.name]
        if isinstance(expr, Prop):
            return attr_of(self.g, binding, self.roles, expr.var, expr.key, self.ctx)
        raise ValueError(f"unsupported operand {expr!r}")

    def _deferred_ok(self, binding, newly):
        """Re-check join props of already-bound nodes that reference ``newly``."""
        for var, spec in self.nodes.items():
            if var not in binding:
                continue
            for key, value in spec.props:
                if isinstance(value, Prop) and value.var in newly and var not in newly:
                    plain = attr_of(self.g, binding, self.roles, value.var, value.key, self.ctx)
                    if not self.ctx.equals(self.g.node_attrs(binding[var]).get(key), plain):
                        return False
        for atom in self.atoms:
            if isinstance(atom, PatternAtom) and atom.edge_var in binding \
                    and atom.edge_var not in newly:
                for key, value in atom.props:
                    if isinstance(value, Prop) and value.var in newly:
                        plain = attr_of(self.g, binding, self.roles, value.var, value.key, self.ctx)
                        if not self.ctx.equals(self.g.edge_attrs(binding[atom.edge_var]).get(key),
                                               plain):
                            return False
        return True

    def _bind(self, binding, items, remaining, rows, done_atom=None):
        for var, value in items:
            binding[var] = value
        newly = [v for v, _ in items]
        if self._deferred_ok(binding, newly) and self._conditions_hold(binding, newly):
            if done_atom is not None:
                remaining.discard(done_atom)
            self._search(binding, remaining, rows)
            if done_atom is not None:
                remaining.add(done_atom)
        for var in newly:
            del binding[var]

    def _search(self, binding, remaining, rows):
        self._tick()
        g = self.g
        choice = None
        best = None
        for ai in sorted(remaining):
            atom = self.atoms[ai]
            sb, db = atom.src_var in binding, atom.dst_var in binding
            if sb and db:
                choice, best = ("check", ai), -1
                break
            if not (sb or db):
                continue
            node = binding[atom.src_var] if sb else binding[atom.dst_var]
            if isinstance(atom, PatternAtom):
                direction = atom.direction if sb else _flip(atom.direction)
                cost = self._fanout(node, atom.types, direction)
            else:
                cached = self._rpq_cache.get((ai, sb, node))
                cost = len(cached) if cached is not None else _PATH_COST
            if best is None or cost < best:
                choice, best = ("expand", ai), cost
        if best != -1:
            for var in self.nodes:
                if var in binding:
                    continue
                cands = self._seed(var, binding)
                if best is None or len(cands) < best:
                    choice, best = ("seed", var, cands), len(cands)
        if choice is None:
            row = dict(binding)
            rows.append(row)
            if self.max_rows is not None and len(rows) >= self.max_rows:
                raise _Stop
            return

        kind = choice[0]
        if kind == "seed":
            var, cands = choice[1], choice[2]
            for n in cands:
                self._tick()
                if self.node_ok(var, n, binding):
                    self._bind(binding, [(var, n)], remaining, rows)
            return

        ai = choice[1]
        atom = self.atoms[ai]
        if isinstance(atom, PathAtom):
            self._path_step(kind, ai, atom, binding, remaining, rows)
            return
        if kind == "check":
            u, v = binding[atom.src_var], binding[atom.dst_var]
            fu = self._fanout(u, atom.types, atom.direction)
            fv = self._fanout(v, atom.types, _flip(atom.direction))
            if fu <= fv:
                pairs = [(e, o) for e, o in self._incident(u, atom.types, atom.direction) if o == v]
            else:
                pairs = [(e, o) for e, o in self._incident(v, atom.types, _flip(atom.direction))
                         if o == u]
            for e, _ in sorted(pairs):
                if self._edge_var_ok(atom, e, binding) and self.edge_ok(atom, e, binding):
                    self._bind(binding, self._edge_items(atom, e, binding), remaining, rows, ai)
            return
        from_src = atom.src_var in binding
        node = binding[atom.src_var] if from_src else binding[atom.dst_var]
        other_var = atom.dst_var if from_src else atom.src_var
        direction = atom.direction if from_src else _flip(atom.direction)
        for e, other in self._incident(node, atom.types, direction):
            self._tick()
            if not self._edge_var_ok(atom, e, binding) or not self.edge_ok(atom, e, binding):
                continue
            if not self.node_ok(other_var, other, binding):
                continue
            items = self._edge_items(atom, e, binding) + [(other_var, other)]
            self._bind(binding, items, remaining, rows, ai)

    def _edge_var_ok(self, atom, e, binding):
        bound = binding.get(atom.edge_var)
        return bound is None or bound == e

    def _edge_items(self, atom, e, binding):
        return [] if atom.edge_var in binding else [(atom.edge_var, e)]

    def _path_step(self, kind, ai, atom, binding, remaining, rows):
        if kind == "check":
            u, v = binding[atom.src_var], binding[atom.dst_var]
            reach = self._rpq(ai, True, u)
            path = reach.get(v)
            if path is not None:
                self._bind(binding, self._path_items(atom, path, binding), remaining, rows, ai)
            return
        from_src = atom.src_var in binding
        node = binding[atom.src_var] if from_src else binding[atom.dst_var]
        other_var = atom.dst_var if from_src else atom.src_var
        reach = self._rpq(ai, from_src, node)
        for other in sorted(reach):
            self._tick()
            if not self.node_ok(other_var, other, binding):
                continue
            path = reach[other] if from_src else reach[other].reversed()
            items = self._path_items(atom, path, binding) + [(other_var, other)]
            self._bind(binding, items, remaining, rows, ai)

    def _path_items(self, atom, path, binding):
        bound = binding.get(atom.path_var)
        if bound is not None:
            return []
        return [(atom.path_var, path)]


def _flip(direction):
    return {"out": "in", "in": "out", "both": "both"}[direction]


def _cond_vars(cond: Condition) -> set[str]:
    out = set()
    for side in (cond.left, cond.right):
        if isinstance(side, Var):
            out.add(side.name)
        elif isinstance(side, Prop):
            out.add(side.var)
        elif isinstance(side, Count):
            raise ValueError("count() cannot appear in a condition")
    return out


def eval_pattern(graph: Graph, atoms, nodes: dict[str, NodeSpec] | None = None,
                 conditions: Iterable[Condition] = (), ctx: LayoutContext | None = None,
                 allow_disconnected: bool = False) -> Bindings:
    """All homomorphic matches of the atom conjunction, one dict per match."""
    return PatternMatcher(graph, atoms, nodes or {}, conditions, ctx, allow_disconnected).run()

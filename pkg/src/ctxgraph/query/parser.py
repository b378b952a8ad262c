"""Recursive-descent parser and printer for the query language.

Grammar (informal)::

    query    := (MATCH pattern ("," pattern)* (WHERE cond (AND cond)*)?)+
                RETURN [DISTINCT] item ("," item)*
                (ORDER BY expr [ASC|DESC] ("," expr [ASC|DESC])*)? (LIMIT int)?
              | CALL name "(" (key "=" value ("," key "=" value)*)? ")"
    pattern  := [pathvar "="] node (edge node)*
    node     := "(" [var] (":" label)* [props] ")"
    edge     := ("-" | "<-") ["[" [var] [":" (types | "/" regex "/")] [props] [bounds] "]"]
                ("-" | "->")
    types    := type ("|" type)*
    bounds   := "*" [int] [".." [int]]
    props    := "{" key ("=" | ":") value ("," ...)* "}"
    item     := expr [AS name]        expr := var | var.key | count(*) | count(var) | literal
"""

from __future__ import annotations

import json
import re

from ..errors import QuerySyntaxError, UnboundVariable, UnknownEdgeType
from .ast import (AlgoSpec, Chain, Condition, Count, Literal, NodeSpec, OrderItem,
                  PathAtom, PatternAtom, Prop, QuerySpec, ReturnItem, Var)
from .paths import DEFAULT_HOP_BOUND
from .regex import Alt, Star, Sym, edge_types, format_regex, parse_regex

KEYWORDS = {"MATCH", "WHERE", "AND", "RETURN", "DISTINCT", "ORDER", "BY", "ASC", "DESC",
            "LIMIT", "CALL", "AS", "IS", "NOT", "NULL", "CONTAINS", "TRUE", "FALSE"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
  | (?P<regex>/[^/]*/)
  | (?P<float>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*|`[^`]+`)
  | (?P<punct>\.\.|->|<-|<=|>=|!=|<>|[()\[\]{},:=<>\-.*|+?])
""", re.VERBOSE)


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind, self.value, self.line, self.col = kind, value, line, col

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r})"


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        raw = m.group()
        col = pos - line_start + 1
        if kind == "string":
            body = raw[1:-1]
            value = re.sub(r"\\(.)", lambda mm: {"n": "\n", "t": "\t"}.get(mm.group(1), mm.group(1)),
                           body)
            tokens.append(Token("string", value, line, col))
        elif kind == "regex":
            tokens.append(Token("regex", raw[1:-1], line, col))
        elif kind == "float":
            tokens.append(Token("float", float(raw), line, col))
        elif kind == "int":
            tokens.append(Token("int", int(raw), line, col))
        elif kind == "ident":
            tokens.append(Token("ident", raw.strip("`"), line, col))
        elif kind == "punct":
            tokens.append(Token("punct", raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            line_start = pos + raw.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", None, line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, hop_bound, known_edge_types):
        self.tokens = tokenize(text)
        self.i = 0
        self.hop_bound = hop_bound
        self.known_edge_types = known_edge_types
        self.atoms = []
        self.nodes: dict[str, NodeSpec] = {}
        self.chains = []
        self.conditions = []
        self.anon = {"n": 0, "e": 0, "p": 0}
        self.roles: dict[str, str] = {}

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message, tok=None, cls=QuerySyntaxError):
        tok = tok or self.tok
        return cls(message, tok.line, tok.col)

    def at(self, value) -> bool:
        return self.tok.kind == "punct" and self.tok.value == value

    def at_kw(self, *words) -> bool:
        return self.tok.kind == "ident" and self.tok.value.upper() in words

    def take(self):
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, value):
        if not self.at(value):
            raise self.error(f"expected {value!r}, found {self.tok.value!r}")
        return self.take()

    def expect_kw(self, word):
        if not self.at_kw(word):
            raise self.error(f"expected {word}, found {self.tok.value!r}")
        return self.take()

    def name(self, what="name"):
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found {self.tok.value!r}")
        return self.take().value

    def fresh(self, kind):
        n = self.anon[kind]
        self.anon[kind] += 1
        return f"_{kind}{n}"

    def declare(self, var, role, tok=None):
        prev = self.roles.get(var)
        if prev is not None and prev != role:
            raise self.error(f"variable {var!r} used as both {prev} and {role}", tok)
        self.roles[var] = role

    # -- top level ----------------------------------------------------------

    def query(self) -> QuerySpec:
        if self.at_kw("CALL"):
            spec = self.call()
        else:
            spec = self.match_query()
        if self.at(";"):
            self.take()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.value!r}")
        return spec

    def call(self) -> QuerySpec:
        self.take()
        name = self.name("algorithm name")
        self.expect("(")
        args = []
        while not self.at(")"):
            key = self.name("argument name")
            if not (self.at("=") or self.at(":")):
                raise self.error("expected '=' after argument name")
            self.take()
            args.append((key, self.arg_value()))
            if not self.at(","):
                break
            self.take()
        self.expect(")")
        return QuerySpec(algo_call=AlgoSpec(name, tuple(args)))

    def arg_value(self):
        if self.at("["):
            self.take()
            items = []
            while not self.at("]"):
                items.append(self.literal())
                if not self.at(","):
                    break
                self.take()
            self.expect("]")
            return tuple(items)
        return self.literal()

    def literal(self):
        tok = self.tok
        if tok.kind in ("string", "int", "float"):
            self.take()
            return tok.value
        if self.at("-") and self.tokens[self.i + 1].kind in ("int", "float"):
            self.take()
            return -self.take().value
        if self.at_kw("TRUE", "FALSE"):
            return self.take().value.upper() == "TRUE"
        if self.at_kw("NULL"):
            self.take()
            return None
        raise self.error(f"expected a literal, found {tok.value!r}")

    def match_query(self) -> QuerySpec:
        if not self.at_kw("MATCH"):
            raise self.error("query must start with MATCH or CALL")
        while self.at_kw("MATCH"):
            self.take()
            self.pattern()
            while self.at(","):
                self.take()
                self.pattern()
            if self.at_kw("WHERE"):
                self.take()
                self.conditions.append(self.condition())
                while self.at_kw("AND"):
                    self.take()
                    self.conditions.append(self.condition())
        self.expect_kw("RETURN")
        distinct = False
        if self.at_kw("DISTINCT"):
            self.take()
            distinct = True
        items = [self.return_item()]
        while self.at(","):
            self.take()
            items.append(self.return_item())
        order = []
        if self.at_kw("ORDER"):
            self.take()
            self.expect_kw("BY")
            while True:
                tok = self.tok
                expr = self.operand()
                desc = False
                if self.at_kw("ASC", "DESC"):
                    desc = self.take().value.upper() == "DESC"
                order.append((OrderItem(expr, desc), tok))
                if not self.at(","):
                    break
                self.take()
        limit = None
        if self.at_kw("LIMIT"):
            self.take()
            if self.tok.kind != "int":
                raise self.error("LIMIT needs an integer")
            limit = self.take().value
        spec = QuerySpec(atoms=tuple(self.atoms), nodes=tuple(self.nodes.items()),
                         chains=tuple(self.chains), conditions=tuple(self.conditions),
                         return_items=tuple(i for i, _ in items), distinct=distinct,
                         order_by=tuple(o for o, _ in order), limit=limit)
        self.validate(spec, items, order)
        return spec

    # -- patterns -----------------------------------------------------------

    def pattern(self):
        path_var = None
        if self.tok.kind == "ident" and self.tokens[self.i + 1].kind == "punct" \
                and self.tokens[self.i + 1].value == "=":
            tok = self.tok
            path_var = self.take().value
            self.declare(path_var, "path", tok)
            self.take()
        first = self.node()
        current = first
        steps = []
        while self.at("-") or self.at("<-"):
            edge = self.edge()
            nxt = self.node()
            steps.append(self.make_atom(current, nxt, edge))
            current = nxt
        self.chains.append(Chain(path_var, first, tuple(steps)))

    def node(self) -> str:
        self.expect("(")
        var = None
        if self.tok.kind == "ident":
            tok = self.tok
            var = self.take().value
            self.declare(var, "node", tok)
        else:
            var = self.fresh("n")
            self.declare(var, "node")
        labels = []
        while self.at(":"):
            self.take()
            labels.append(self.name("label"))
        props = self.props() if self.at("{") else []
        self.expect(")")
        old = self.nodes.get(var, NodeSpec())
        merged_labels = tuple(dict.fromkeys(old.labels + tuple(labels)))
        merged_props = tuple(dict.fromkeys(old.props + tuple(props)))
        self.nodes[var] = NodeSpec(merged_labels, merged_props)
        return var

    def props(self):
        self.expect("{")
        out = []
        while not self.at("}"):
            key = self.name("property key")
            if not (self.at("=") or self.at(":")):
                raise self.error("expected '=' or ':' in property map")
            self.take()
            if self.tok.kind == "ident" and not self.at_kw("TRUE", "FALSE", "NULL"):
                var = self.take().value
                self.expect(".")
                out.append((key, Prop(var, self.name("property key"))))
            else:
                out.append((key, Literal(self.literal())))
            if not self.at(","):
                break
            self.take()
        self.expect("}")
        return out

    def edge(self):
        start = self.tok
        left_arrow = self.take().value == "<-"
        var = None
        types = None
        regex = None
        props = []
        bounds = None
        if self.at("["):
            self.take()
            if self.tok.kind == "ident":
                var = self.take().value
            if self.at(":"):
                self.take()
                if self.tok.kind == "regex":
                    rtok = self.take()
                    try:
                        regex = parse_regex(rtok.value)
                    except QuerySyntaxError as exc:
                        raise self.error(str(exc), rtok) from None
                else:
                    types = [self.name("edge type")]
                    while self.at("|"):
                        self.take()
                        types.append(self.name("edge type"))
            if self.at("{"):
                props = self.props()
            if self.at("*"):
                bounds = self.bounds()
            self.expect("]")
        if self.at("->"):
            self.take()
            right_arrow = True
        elif self.at("-"):
            self.take()
            right_arrow = False
        else:
            raise self.error("expected '-' or '->' to close the edge")
        if left_arrow and right_arrow:
            raise self.error("an edge cannot point both ways", start)
        direction = "in" if left_arrow else "out" if right_arrow else "both"
        if regex is not None and direction != "both":
            raise self.error("path-regex edges carry their own directions; write -[:/../]-", start)
        return dict(var=var, types=types, regex=regex, props=props, bounds=bounds,
                    direction=direction, tok=start)

    def bounds(self):
        self.expect("*")
        lo = hi = None
        if self.tok.kind == "int":
            lo = self.take().value
            hi = lo
        if self.at(".."):
            self.take()
            hi = self.take().value if self.tok.kind == "int" else None
            lo = 1 if lo is None else lo
        if lo is None:
            lo = 1
        return lo, hi

    def make_atom(self, left, right, edge) -> int:
        tok = edge["tok"]
        var = edge["var"]
        if edge["regex"] is not None or edge["bounds"] is not None:
            if edge["props"]:
                raise self.error("variable-length edges cannot carry property maps", tok)
            if var is None:
                var = self.fresh("p")
            self.declare(var, "path", tok)
            if edge["regex"] is not None:
                lo, hi = edge["bounds"] if edge["bounds"] else (0, self.hop_bound)
                form, regex, types = "regex", edge["regex"], None
            else:
                lo, hi = edge["bounds"]
                types = tuple(edge["types"]) if edge["types"] else None
                regex = Star(_step_regex(types, edge["direction"]))
                form = "bounds"
            hi = self.hop_bound if hi is None else hi
            if hi > self.hop_bound:
                raise self.error(f"hop bound {hi} exceeds the configured maximum {self.hop_bound}", tok)
            if lo > hi:
                raise self.error(f"empty hop range {lo}..{hi}", tok)
            atom = PathAtom(left, right, var, regex, lo, hi, form, types, edge["direction"])
        else:
            if var is None:
                var = self.fresh("e")
            self.declare(var, "edge", tok)
            types = tuple(edge["types"]) if edge["types"] else None
            atom = PatternAtom(left, right, var, types, edge["direction"], tuple(edge["props"]))
        self.check_types(atom, tok)
        self.atoms.append(atom)
        return len(self.atoms) - 1

    def check_types(self, atom, tok):
        if self.known_edge_types is None:
            return
        if isinstance(atom, PatternAtom):
            used = set(atom.types or ())
        else:
            used = edge_types(atom.regex)
        unknown = used - set(self.known_edge_types)
        if unknown:
            raise self.error(f"unknown edge type(s) {sorted(unknown)}", tok, UnknownEdgeType)

    # -- conditions and projections ------------------------------------------

    def operand(self):
        tok = self.tok
        if tok.kind == "ident" and not self.at_kw("TRUE", "FALSE", "NULL"):
            if tok.value.lower() == "count" and self.tokens[self.i + 1].kind == "punct" \
                    and self.tokens[self.i + 1].value == "(":
                self.take()
                self.take()
                if self.at("*"):
                    self.take()
                    var = None
                else:
                    var = self.name("variable")
                self.expect(")")
                return Count(var)
            var = self.take().value
            if self.at("."):
                self.take()
                return Prop(var, self.name("property key"))
            return Var(var)
        return Literal(self.literal())

    def condition(self):
        left = self.operand()
        if self.at_kw("IS"):
            self.take()
            negate = False
            if self.at_kw("NOT"):
                self.take()
                negate = True
            self.expect_kw("NULL")
            return Condition(left, "NOTNULL" if negate else "ISNULL")
        if self.at_kw("CONTAINS"):
            self.take()
            return Condition(left, "CONTAINS", self.operand())
        tok = self.tok
        if tok.kind != "punct" or tok.value not in ("=", "!=", "<>", "<", ">", "<=", ">=", "<-"):
            raise self.error(f"expected a comparison operator, found {tok.value!r}")
        self.take()
        op = tok.value
        if op == "<-":   # "x <-1" tokenises as the arrow
            value = self.tok
            if value.kind not in ("int", "float"):
                raise self.error("expected a number", value)
            self.take()
            return Condition(left, "<", Literal(-value.value))
        if op == "<>":
            op = "!="
        return Condition(left, op, self.operand())

    def return_item(self):
        tok = self.tok
        expr = self.operand()
        alias = None
        if self.at_kw("AS"):
            self.take()
            alias = self.name("alias")
        return ReturnItem(expr, alias), tok

    # -- validation -----------------------------------------------------------

    def validate(self, spec: QuerySpec, items, order):
        node_vars = set(spec.node_vars)
        edge_vars = set(spec.edge_vars)
        bound = node_vars | edge_vars | {a.path_var for a in spec.atoms if isinstance(a, PathAtom)}
        bound |= set(spec.path_vars)
        attr_vars = node_vars | edge_vars

        def need(var, tok, attr=False):
            pool = attr_vars if attr else bound
            if var not in pool:
                raise UnboundVariable(f"variable {var!r} is not bound by the pattern",
                                      tok.line, tok.col)

        def check_expr(expr, tok):
            if isinstance(expr, Var):
                need(expr.name, tok)
            elif isinstance(expr, Prop):
                need(expr.var, tok, attr=True)
            elif isinstance(expr, Count) and expr.var is not None:
                need(expr.var, tok)

        first = self.tokens[0]
        for _, ns in spec.nodes:
            for _, value in ns.props:
                if isinstance(value, Prop):
                    need(value.var, first, attr=True)
        for atom in spec.atoms:
            if isinstance(atom, PatternAtom):
                for _, value in atom.props:
                    if isinstance(value, Prop):
                        need(value.var, first, attr=True)
        for cond in spec.conditions:
            for side in (cond.left, cond.right):
                check_expr(side, first)
                if isinstance(side, Count):
                    raise QuerySyntaxError("count() is not allowed in WHERE", first.line, first.col)
        names = set()
        for item, tok in items:
            check_expr(item.expr, tok)
            if item.name in names:
                raise QuerySyntaxError(f"duplicate result column {item.name!r}", tok.line, tok.col)
            names.add(item.name)
        for o, tok in order:
            if isinstance(o.expr, Var) and o.expr.name in names:
                continue
            check_expr(o.expr, tok)


def _step_regex(types, direction):
    syms = [Sym(t, direction) for t in types] if types else [Sym(None, direction)]
    return syms[0] if len(syms) == 1 else Alt(tuple(syms))


def parse_query(text: str, *, hop_bound: int = DEFAULT_HOP_BOUND,
                edge_types: set[str] | None = None) -> QuerySpec:
    """Parse query text into a :class:`QuerySpec`.

    ``edge_types``, when given, is the schema's edge-type vocabulary; other
    types raise :class:`UnknownEdgeType`.
    """
    return _Parser(text, hop_bound, edge_types).query()


# -- printing -------------------------------------------------------------

def _lit(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_lit(v) for v in value) + "]"
    return json.dumps(str(value), ensure_ascii=False)


def _expr(expr) -> str:
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Prop):
        return f"{expr.var}.{expr.key}"
    if isinstance(expr, Count):
        return f"count({expr.var or '*'})"
    return _lit(expr.value)


def _props(props) -> str:
    if not props:
        return ""
    parts = []
    for key, value in props:
        parts.append(f"{key} = {_expr(value) if isinstance(value, Prop) else _lit(value.value)}")
    return "{" + ", ".join(parts) + "}"


def format_query(spec: QuerySpec) -> str:
    """Canonical text for ``spec``; ``parse_query(format_query(s)) == s``."""
    if spec.algo_call is not None:
        args = ", ".join(f"{k} = {_lit(v)}" for k, v in spec.algo_call.args)
        return f"CALL {spec.algo_call.name}({args})"
    printed = set()

    def node(var):
        if var in printed:
            return f"({var})"
        printed.add(var)
        ns = spec.node_spec(var)
        labels = "".join(f":{label}" for label in ns.labels)
        return f"({var}{labels}{_props(ns.props)})"

    chains = []
    for chain in spec.chains:
        text = (f"{chain.path_var} = " if chain.path_var else "") + node(chain.first)
        for idx in chain.steps:
            atom = spec.atoms[idx]
            left = "<-" if atom.direction == "in" else "-"
            right = "->" if atom.direction == "out" else "-"
            if isinstance(atom, PatternAtom):
                types = ":" + "|".join(atom.types) if atom.types else ""
                body = f"{atom.edge_var}{types}{_props(atom.props)}"
            elif atom.form == "bounds":
                types = ":" + "|".join(atom.types) if atom.types else ""
                body = f"{atom.path_var}{types}*{atom.min_hops}..{atom.max_hops}"
            else:
                body = f"{atom.path_var}:/{format_regex(atom.regex)}/*{atom.min_hops}..{atom.max_hops}"
            text += f"{left}[{body}]{right}" + node(atom.dst_var)
        chains.append(text)
    out = "MATCH " + ", ".join(chains)
    if spec.conditions:
        conds = []
        for c in spec.conditions:
            if c.op == "ISNULL":
                conds.append(f"{_expr(c.left)} IS NULL")
            elif c.op == "NOTNULL":
                conds.append(f"{_expr(c.left)} IS NOT NULL")
            else:
                conds.append(f"{_expr(c.left)} {c.op} {_expr(c.right)}")
        out += " WHERE " + " AND ".join(conds)
    items = []
    for item in spec.return_items:
        items.append(_expr(item.expr) + (f" AS {item.alias}" if item.alias else ""))
    out += " RETURN " + ("DISTINCT " if spec.distinct else "") + ", ".join(items)
    if spec.order_by:
        out += " ORDER BY " + ", ".join(
            _expr(o.expr) + (" DESC" if o.descending else " ASC") for o in spec.order_by)
    if spec.limit is not None:
        out += f" LIMIT {spec.limit}"
    return out

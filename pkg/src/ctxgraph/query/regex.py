"""Regular expressions over edge steps, compiled to Thompson automata.

A symbol is an edge type plus a traversal direction. Text syntax::

    isAuthor>            isAuthor edge traversed forwards
    isAuthor<            ... backwards
    isAuthor             either direction
    _                    any edge type (direction suffixes apply)
    a b   or   a . b     concatenation
    a | b                alternation
    a*  a+  a?           Kleene star, one-or-more, optional
    ( ... )              grouping
    ()                   the empty word
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import AutomatonTooLarge, QuerySyntaxError

MAX_STATES = 64


@dataclass(frozen=True)
class Sym:
    type: str | None        # None matches any edge type
    dir: str = "both"       # "out", "in" or "both"


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Cat:
    parts: tuple


@dataclass(frozen=True)
class Alt:
    options: tuple


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Plus:
    inner: object


@dataclass(frozen=True)
class Opt:
    inner: object


_TOKEN = re.compile(r"\s*(?:(?P<sym>[A-Za-z_][A-Za-z0-9_]*)(?P<dir>[<>])?|(?P<op>[|*+?().]))")


def parse_regex(text: str):
    """Parse the path-regex syntax into an AST."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise QuerySyntaxError(f"bad character in path regex: {text[pos:]!r}", 1, pos + 1)
        if m.group("sym"):
            name = m.group("sym")
            direction = {"<": "in", ">": "out", None: "both"}[m.group("dir")]
            tokens.append(("sym", Sym(None if name == "_" else name, direction)))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    parser = _RegexParser(tokens)
    node = parser.alternation()
    if parser.i != len(tokens):
        raise QuerySyntaxError(f"unexpected {tokens[parser.i][1]!r} in path regex {text!r}")
    return node


class _RegexParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def alternation(self):
        options = [self.concatenation()]
        while self.peek() == ("op", "|"):
            self.i += 1
            options.append(self.concatenation())
        return options[0] if len(options) == 1 else Alt(tuple(options))

    def concatenation(self):
        parts = []
        while True:
            kind, val = self.peek()
            if kind == "op" and val == ".":
                self.i += 1
                continue
            if kind == "sym" or (kind == "op" and val == "("):
                parts.append(self.postfix())
            else:
                break
        if not parts:
            return Eps()
        return parts[0] if len(parts) == 1 else Cat(tuple(parts))

    def postfix(self):
        kind, val = self.peek()
        self.i += 1
        if kind == "sym":
            node = val
        else:
            node = self.alternation()
            if self.peek() != ("op", ")"):
                raise QuerySyntaxError("unbalanced parenthesis in path regex")
            self.i += 1
        while self.peek()[0] == "op" and self.peek()[1] in "*+?":
            op = self.peek()[1]
            self.i += 1
            node = {"*": Star, "+": Plus, "?": Opt}[op](node)
        return node


def format_regex(node) -> str:
    """Inverse of :func:`parse_regex` (up to whitespace and grouping)."""
    if isinstance(node, Sym):
        name = "_" if node.type is None else node.type
        return name + {"out": ">", "in": "<", "both": ""}[node.dir]
    if isinstance(node, Eps):
        return "()"
    if isinstance(node, Cat):
        return " ".join(_group(p, (Alt, Cat)) for p in node.parts)
    if isinstance(node, Alt):
        return "|".join(_group(o, Alt) for o in node.options)
    op = {Star: "*", Plus: "+", Opt: "?"}[type(node)]
    return _group(node.inner, (Alt, Cat)) + op


def _group(node, kinds):
    text = format_regex(node)
    return f"({text})" if isinstance(node, kinds) else text


def reverse_regex(node):
    """Regex for the same paths walked from the other end."""
    if isinstance(node, Sym):
        return Sym(node.type, {"out": "in", "in": "out", "both": "both"}[node.dir])
    if isinstance(node, Eps):
        return node
    if isinstance(node, Cat):
        return Cat(tuple(reverse_regex(p) for p in reversed(node.parts)))
    if isinstance(node, Alt):
        return Alt(tuple(reverse_regex(o) for o in node.options))
    return type(node)(reverse_regex(node.inner))


def symbols(node) -> set[Sym]:
    if isinstance(node, Sym):
        return {node}
    if isinstance(node, Eps):
        return set()
    if isinstance(node, Cat):
        return set().union(*(symbols(p) for p in node.parts))
    if isinstance(node, Alt):
        return set().union(*(symbols(o) for o in node.options))
    return symbols(node.inner)


def edge_types(node) -> set[str]:
    return {s.type for s in symbols(node) if s.type is not None}


class Automaton:
    """Thompson NFA with precomputed epsilon closures.

    ``moves[q]`` lists ``(symbol, target)`` transitions available from the
    closure of state ``q``; ``accepting[q]`` tells whether that closure holds
    the final state.
    """

    def __init__(self, node, max_states: int = MAX_STATES):
        self._eps: list[list[int]] = []
        self._sym: list[list[tuple[Sym, int]]] = []
        start, final = self._build(node)
        if len(self._eps) > max_states:
            raise AutomatonTooLarge(f"path regex needs {len(self._eps)} states (> {max_states})")
        self.start = start
        self.final = final
        self.size = len(self._eps)
        closures = [self._closure(q) for q in range(self.size)]
        self.accepting = [final in c for c in closures]
        self.moves = [[mv for p in sorted(c) for mv in self._sym[p]] for c in closures]

    def _state(self):
        self._eps.append([])
        self._sym.append([])
        return len(self._eps) - 1

    def _build(self, node):
        if isinstance(node, Sym):
            s, f = self._state(), self._state()
            self._sym[s].append((node, f))
            return s, f
        if isinstance(node, Eps):
            s = self._state()
            return s, s
        if isinstance(node, Cat):
            first_start, prev_final = self._build(node.parts[0])
            for part in node.parts[1:]:
                s, f = self._build(part)
                self._eps[prev_final].append(s)
                prev_final = f
            return first_start, prev_final
        if isinstance(node, Alt):
            s, f = self._state(), self._state()
            for option in node.options:
                os_, of = self._build(option)
                self._eps[s].append(os_)
                self._eps[of].append(f)
            return s, f
        s, f = self._state(), self._state()
        is_, if_ = self._build(node.inner)
        self._eps[s].append(is_)
        self._eps[if_].append(f)
        if isinstance(node, (Star, Opt)):
            self._eps[s].append(f)
        if isinstance(node, (Star, Plus)):
            self._eps[if_].append(is_)
        return s, f

    def _closure(self, q):
        seen = {q}
        stack = [q]
        while stack:
            for r in self._eps[stack.pop()]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return seen

    def accepts(self, word) -> bool:
        """Whether a sequence of ``(type, dir)`` steps is in the language.

        ``dir`` is "out" or "in"; a step matches a symbol when the types agree
        (or the symbol is a wildcard) and the directions are compatible.
        """
        current = {self.start}
        for etype, direction in word:
            nxt = set()
            for q in current:
                for sym, r in self.moves[q]:
                    if step_matches(sym, etype, direction):
                        nxt.add(r)
            if not nxt:
                return False
            current = nxt
        return any(self.accepting[q] for q in current)


def step_matches(sym: Sym, etype: str, direction: str) -> bool:
    return (sym.type is None or sym.type == etype) and sym.dir in (direction, "both")

"""Query AST."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Literal:
    value: Any


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Prop:
    var: str
    key: str


@dataclass(frozen=True)
class Count:
    var: str | None = None   # None for count(*)


@dataclass(frozen=True)
class NodeSpec:
    """Label and attribute constraints on one node variable.

    ``props`` values are :class:`Literal` or :class:`Prop` (a value join on
    another variable's attribute).
    """

    labels: tuple[str, ...] = ()
    props: tuple[tuple[str, Any], ...] = ()


@dataclass(frozen=True)
class PatternAtom:
    """One fixed edge step between two node variables.

    ``direction`` is relative to ``src_var -> dst_var`` as written:
    "out", "in" or "both". ``types`` of ``None`` matches any edge type.
    """

    src_var: str
    dst_var: str
    edge_var: str
    types: tuple[str, ...] | None = None
    direction: str = "out"
    props: tuple[tuple[str, Any], ...] = ()


@dataclass(frozen=True)
class PathAtom:
    """A regular-path step; ``path_var`` names the witness walk."""

    src_var: str
    dst_var: str
    path_var: str
    regex: Any
    min_hops: int = 1
    max_hops: int = 8
    # how the atom was written: "bounds" for -[:t*a..b]->, "regex" for -[:/../]-
    form: str = "regex"
    types: tuple[str, ...] | None = None
    direction: str = "out"


@dataclass(frozen=True)
class Condition:
    left: Any
    op: str          # = != < > <= >= CONTAINS ISNULL NOTNULL
    right: Any = None


@dataclass(frozen=True)
class ReturnItem:
    expr: Any
    alias: str | None = None

    @property
    def name(self) -> str:
        if self.alias:
            return self.alias
        e = self.expr
        if isinstance(e, Var):
            return e.name
        if isinstance(e, Prop):
            return f"{e.var}.{e.key}"
        if isinstance(e, Count):
            return f"count({e.var or '*'})"
        return str(e)


@dataclass(frozen=True)
class OrderItem:
    expr: Any
    descending: bool = False


@dataclass(frozen=True)
class AlgoSpec:
    name: str
    args: tuple[tuple[str, Any], ...] = ()

    def arg(self, key, default=None):
        for k, v in self.args:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class Chain:
    """One comma-separated pattern as written, for printing and path variables."""

    path_var: str | None
    first: str
    steps: tuple[int, ...]   # atom indices, in written order


@dataclass(frozen=True)
class QuerySpec:
    atoms: tuple = ()
    nodes: tuple[tuple[str, NodeSpec], ...] = ()
    chains: tuple[Chain, ...] = ()
    conditions: tuple[Condition, ...] = ()
    return_items: tuple[ReturnItem, ...] = ()
    distinct: bool = False
    order_by: tuple[OrderItem, ...] = ()
    limit: int | None = None
    algo_call: AlgoSpec | None = None

    def node_spec(self, var: str) -> NodeSpec:
        for name, spec in self.nodes:
            if name == var:
                return spec
        return NodeSpec()

    @property
    def node_vars(self) -> list[str]:
        return [name for name, _ in self.nodes]

    @property
    def edge_vars(self) -> list[str]:
        return [a.edge_var for a in self.atoms if isinstance(a, PatternAtom)]

    @property
    def path_vars(self) -> list[str]:
        return [c.path_var for c in self.chains if c.path_var]

    @property
    def columns(self) -> list[str]:
        return [item.name for item in self.return_items]


@dataclass
class Bindings:
    """Raw pattern matches: one dict per match, variable -> id or witness path."""

    rows: list[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

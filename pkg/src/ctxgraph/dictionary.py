"""Dictionary encoding of string attributes (polyglot persistence emulation).

String attributes selected by a :class:`LayoutConfig` are moved out of the
graph into per-namespace dictionaries and replaced by integer :class:`Code`
values. The dictionaries play the role of the external key-value stores.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TypeMismatch, UnknownCode, UnknownNamespace
from .graph import Code, Graph

DICT_SUFFIX = ".dict.tsv"


class Dictionary:
    """Bijective string <-> code mapping for one namespace.

    Codes are dense, start at 0 and follow first-seen order. They are never
    reused.
    """

    def __init__(self, namespace: str):
        self.namespace = namespace
        self.forward: dict[str, int] = {}
        self.reverse: list[str] = []

    @property
    def next_code(self) -> int:
        return len(self.reverse)

    def encode(self, value: str) -> int:
        code = self.forward.get(value)
        if code is None:
            code = len(self.reverse)
            self.forward[value] = code
            self.reverse.append(value)
        return code

    def lookup(self, value: str) -> int | None:
        """Code of ``value`` without assigning a new one."""
        return self.forward.get(value)

    def decode(self, code: int) -> str:
        if not isinstance(code, int) or not 0 <= code < len(self.reverse):
            raise UnknownCode(f"{self.namespace}: {code}")
        return self.reverse[code]

    def string_bytes(self) -> int:
        return sum(len(s.encode("utf-8")) for s in self.reverse)

    def __len__(self):
        return len(self.reverse)

    def __eq__(self, other):
        return (isinstance(other, Dictionary) and self.namespace == other.namespace
                and self.reverse == other.reverse)

    def __repr__(self):
        return f"<Dictionary {self.namespace!r} size={len(self)}>"


class DictionaryStore:
    """The set of dictionaries backing one encoded graph, keyed by namespace."""

    def __init__(self, dictionaries=()):
        self._dicts: dict[str, Dictionary] = {}
        for d in dictionaries:
            self._dicts[d.namespace] = d

    def encode(self, namespace: str, value: str) -> int:
        d = self._dicts.get(namespace)
        if d is None:
            d = self._dicts[namespace] = Dictionary(namespace)
        return d.encode(value)

    def decode(self, namespace: str, code: int) -> str:
        d = self._dicts.get(namespace)
        if d is None:
            raise UnknownNamespace(namespace)
        return d.decode(code)

    def lookup(self, namespace: str, value: str) -> Code | None:
        """The existing code for ``value``, or ``None`` if it was never encoded."""
        d = self._dicts.get(namespace)
        if d is None:
            return None
        code = d.lookup(value)
        return None if code is None else Code(namespace, code)

    def decode_code(self, code: Code) -> str:
        return self.decode(code.namespace, code.code)

    def decode_value(self, value):
        """Decode a Code (or a tuple holding codes); other values pass through."""
        if isinstance(value, Code):
            return self.decode(value.namespace, value.code)
        if isinstance(value, tuple):
            return tuple(self.decode_value(v) for v in value)
        return value

    def namespaces(self) -> list[str]:
        return sorted(self._dicts)

    def __getitem__(self, namespace: str) -> Dictionary:
        try:
            return self._dicts[namespace]
        except KeyError:
            raise UnknownNamespace(namespace) from None

    def __contains__(self, namespace):
        return namespace in self._dicts

    def __iter__(self) -> Iterator[Dictionary]:
        return iter(self._dicts[ns] for ns in sorted(self._dicts))

    def __len__(self):
        return len(self._dicts)

    def __eq__(self, other):
        return isinstance(other, DictionaryStore) and list(self) == list(other)

    def __repr__(self):
        return f"<DictionaryStore {self.namespaces()}>"


@dataclass(frozen=True)
class LayoutConfig:
    """Which ``(label or edge type, attribute)`` pairs are dictionary-encoded.

    ``stores`` groups namespaces into key-value stores: Poly1 keeps every
    namespace in one store, Poly2 gives each namespace its own store.
    """

    name: str
    encoded_attrs: frozenset = frozenset()
    stores: tuple = ()

    def namespace_for(self, owner: str, key: str) -> str | None:
        if (owner, key) in self.encoded_attrs:
            return f"{owner}.{key}"
        return None

    def store_of(self, namespace: str) -> str | None:
        for store, members in self.stores:
            if namespace in members:
                return store
        return None

    @property
    def store_mapping(self) -> dict[tuple[str, str], str]:
        return {pair: f"{pair[0]}.{pair[1]}" for pair in sorted(self.encoded_attrs)}


POLY1_ATTRS = frozenset({
    ("Entity", "source"),
    ("hasRelation", "function"),
    ("Document", "source"),
    ("PublicationType", "name"),
})
POLY2_ATTRS = POLY1_ATTRS | {
    ("Entity", "preferredLabel"),
    ("Author", "forename"),
    ("Author", "surname"),
    ("Journal", "name"),
    ("Annotation", "label"),
}


def _layout(name, attrs, shared):
    namespaces = sorted(f"{o}.{k}" for o, k in attrs)
    if not namespaces:
        stores = ()
    elif shared:
        stores = (("kv0", tuple(namespaces)),)
    else:
        stores = tuple((f"kv{i}", (ns,)) for i, ns in enumerate(namespaces))
    return LayoutConfig(name, frozenset(attrs), stores)


FULL = _layout("Full", frozenset(), True)
POLY1 = _layout("Poly1", POLY1_ATTRS, True)
POLY2 = _layout("Poly2", POLY2_ATTRS, False)
LAYOUTS = {"full": FULL, "poly1": POLY1, "poly2": POLY2}


def get_layout(name: str | LayoutConfig) -> LayoutConfig:
    if isinstance(name, LayoutConfig):
        return name
    try:
        return LAYOUTS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown layout {name!r}; expected one of {sorted(LAYOUTS)}") from None


def _encode_map(attrs, owners, layout, store, where):
    out = None
    for key, value in attrs.items():
        ns = None
        for owner in owners:
            ns = layout.namespace_for(owner, key)
            if ns is not None:
                break
        if ns is None:
            continue
        if not isinstance(value, str):
            raise TypeMismatch(f"{where}: attribute {key!r} is {type(value).__name__}, not text")
        if out is None:
            out = dict(attrs)
        out[key] = Code(ns, store.encode(ns, value))
    return attrs if out is None else out


def apply_layout(graph: Graph, layout: LayoutConfig,
                 store: DictionaryStore | None = None) -> tuple[Graph, DictionaryStore]:
    """Encode the layout's attributes, returning a new graph and its dictionaries.

    Nodes are visited in id order, then edges, so code assignment is
    deterministic. The Full layout returns ``graph`` itself.
    """
    store = DictionaryStore() if store is None else store
    if not layout.encoded_attrs:
        return graph, store
    node_attrs = []
    for n in graph.nodes():
        owners = sorted(graph.labels(n))
        node_attrs.append(_encode_map(graph.node_attrs(n), owners, layout, store, f"node {n}"))
    edge_attrs = []
    for e in graph.edges():
        edge_attrs.append(_encode_map(graph.edge_attrs(e), (graph.edge_type(e),), layout,
                                      store, f"edge {e}"))
    return graph.replace_attributes(node_attrs, edge_attrs), store


def decode_all(graph: Graph, store: DictionaryStore) -> Graph:
    """Replace every Code in ``graph`` by its string."""
    def plain(attrs):
        if not any(isinstance(v, Code) or (isinstance(v, tuple) and any(isinstance(x, Code) for x in v))
                   for v in attrs.values()):
            return attrs
        return {k: store.decode_value(v) for k, v in attrs.items()}

    node_attrs = [plain(graph.node_attrs(n)) for n in graph.nodes()]
    edge_attrs = [plain(graph.edge_attrs(e)) for e in graph.edges()]
    return graph.replace_attributes(node_attrs, edge_attrs)


@dataclass
class FootprintReport:
    graph_string_bytes: int = 0
    dict_bytes: int = 0
    node_count: int = 0
    edge_count: int = 0
    store_bytes: dict = field(default_factory=dict)


def _text_bytes(attrs) -> int:
    total = 0
    for v in attrs.values():
        if isinstance(v, str):
            total += len(v.encode("utf-8"))
        elif isinstance(v, tuple):
            total += sum(len(s.encode("utf-8")) for s in v if isinstance(s, str))
    return total


def footprint(graph: Graph, store: DictionaryStore | None = None,
              layout: LayoutConfig | None = None) -> FootprintReport:
    """Count text bytes held by the graph and by its dictionaries."""
    report = FootprintReport(node_count=graph.node_count, edge_count=graph.edge_count)
    for n in graph.nodes():
        report.graph_string_bytes += _text_bytes(graph.node_attrs(n))
    for e in graph.edges():
        report.graph_string_bytes += _text_bytes(graph.edge_attrs(e))
    for d in store or ():
        size = d.string_bytes()
        report.dict_bytes += size
        key = (layout.store_of(d.namespace) if layout else None) or d.namespace
        report.store_bytes[key] = report.store_bytes.get(key, 0) + size
    return report


# -- persistence --------------------------------------------------------

def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(s: str) -> str:
    out = []
    it = iter(s)
    for ch in it:
        if ch == "\\":
            nxt = next(it, "")
            out.append({"t": "\t", "n": "\n", "r": "\r", "\\": "\\"}.get(nxt, nxt))
        else:
            out.append(ch)
    return "".join(out)


def write_dictionary(d: Dictionary, directory) -> Path:
    """Write ``<namespace>.dict.tsv``: one ``code<TAB>string`` line per entry, by code."""
    path = Path(directory) / f"{d.namespace}{DICT_SUFFIX}"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for code, value in enumerate(d.reverse):
            fh.write(f"{code}\t{_escape(value)}\n")
    return path


def read_dictionary(path) -> Dictionary:
    path = Path(path)
    namespace = path.name[: -len(DICT_SUFFIX)]
    d = Dictionary(namespace)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            code_text, _, value = line.partition("\t")
            code = int(code_text)
            if code != len(d.reverse):
                raise ValueError(f"{path}:{lineno}: codes must be dense and sorted")
            d.forward[_unescape(value)] = code
            d.reverse.append(_unescape(value))
    return d


def write_store(store: DictionaryStore, directory) -> list[Path]:
    Path(directory).mkdir(parents=True, exist_ok=True)
    return [write_dictionary(d, directory) for d in store]


def read_store(directory) -> DictionaryStore:
    paths = sorted(Path(directory).glob(f"*{DICT_SUFFIX}"))
    return DictionaryStore(read_dictionary(p) for p in paths)

"""Bulk import of node and edge CSV files.

The CSV dialect follows the usual graph bulk-import convention: comma
separated, double-quote escaping, UTF-8, and a header row whose cells read
``name[:type]``. Reserved columns are ``:ID`` (merge key), ``:LABEL``
(``;``-separated labels), ``:START_ID``, ``:END_ID`` and ``:TYPE``.

Value types: ``string`` (default), ``int``/``long``, ``date`` (ISO-8601),
``string[]`` (``;``-separated) and ``code(<namespace>)`` for dictionary
codes written by an encoded snapshot. An empty cell means "no attribute".
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
from collections.abc import Iterable, Iterator
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dictionary import FULL, DictionaryStore, LayoutConfig, apply_layout
from .errors import ImportAborted, MalformedRow, MissingIdColumn
from .graph import DEFAULT_INDEXED_KEYS, Code, Graph

RESERVED = {"ID", "LABEL", "START_ID", "END_ID", "TYPE", "IGNORE"}
LIST_SEP = ";"


@dataclass
class NodeRecord:
    external_id: str
    labels: frozenset[str]
    attributes: dict = field(default_factory=dict)


@dataclass
class EdgeRecord:
    start_external_id: str
    end_external_id: str
    type: str
    attributes: dict = field(default_factory=dict)


@dataclass
class ImportReport:
    records_read: int = 0
    unique_nodes: int = 0
    merged_duplicates: int = 0
    edge_records_read: int = 0
    edges_created: int = 0
    dangling_edges_skipped: int = 0
    attribute_conflicts: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass(frozen=True)
class Column:
    name: str
    type: str

    @property
    def reserved(self) -> bool:
        return self.type in RESERVED


def parse_header(cells: Iterable[str]) -> list[Column]:
    """``["id:ID", "title", ":LABEL"]`` -> typed column specs."""
    columns = []
    for cell in cells:
        name, sep, kind = cell.strip().rpartition(":")
        if not sep:
            name, kind = kind, "string"
        elif kind.startswith("code(") or kind in RESERVED:
            pass
        else:
            kind = kind.lower()
            if kind == "long":
                kind = "int"
            if kind not in ("string", "int", "date", "string[]"):
                raise ValueError(f"unknown column type in header cell {cell!r}")
        columns.append(Column(name, kind))
    return columns


def format_header(columns: Iterable[Column]) -> list[str]:
    out = []
    for c in columns:
        out.append(c.name if c.type == "string" else f"{c.name}:{c.type}")
    return out


def parse_cell(text: str, kind: str):
    if kind == "string":
        return text
    if kind == "int":
        return int(text)
    if kind == "date":
        return _dt.date.fromisoformat(text)
    if kind == "string[]":
        return tuple(text.split(LIST_SEP))
    if kind.startswith("code(") and kind.endswith(")"):
        return Code(kind[5:-1], int(text))
    raise ValueError(f"unknown column type {kind!r}")


def _rows(path, header_spec):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MalformedRow(path, 1, "missing header row")
        columns = parse_header(header_spec if header_spec is not None else header)
        yield columns
        for row in reader:
            if not row:
                continue
            if len(row) != len(columns):
                raise MalformedRow(path, reader.line_num,
                                   f"{len(row)} columns under a {len(columns)}-column header")
            yield reader.line_num, row


def _attributes(path, lineno, columns, row):
    attrs = {}
    for col, cell in zip(columns, row):
        if col.reserved or cell == "":
            continue
        try:
            value = parse_cell(cell, col.type)
        except ValueError as exc:
            raise MalformedRow(path, lineno, f"column {col.name!r}: {exc}") from None
        attrs.setdefault(col.name, value)
    return attrs


def parse_node_csv(path, header_spec: Iterable[str] | None = None,
                   default_labels: Iterable[str] = ()) -> Iterator[NodeRecord]:
    """Yield one :class:`NodeRecord` per data row.

    ``header_spec`` replaces the file's own header cells when given; the
    header row is still skipped.
    """
    rows = _rows(path, header_spec)
    columns = next(rows)
    id_cols = [i for i, c in enumerate(columns) if c.type == "ID"]
    if not id_cols:
        raise MissingIdColumn(f"{path}: no :ID column")
    label_cols = [i for i, c in enumerate(columns) if c.type == "LABEL"]
    default_labels = frozenset(default_labels)
    for lineno, row in rows:
        ext = row[id_cols[0]]
        if not ext:
            raise MalformedRow(path, lineno, "empty :ID")
        labels = set(default_labels)
        for i in label_cols:
            labels.update(x for x in row[i].split(LIST_SEP) if x)
        if not labels:
            raise MalformedRow(path, lineno, "row has no labels")
        yield NodeRecord(ext, frozenset(labels), _attributes(path, lineno, columns, row))


def parse_edge_csv(path, header_spec: Iterable[str] | None = None,
                   default_type: str | None = None) -> Iterator[EdgeRecord]:
    rows = _rows(path, header_spec)
    columns = next(rows)
    kinds = [c.type for c in columns]
    for needed in ("START_ID", "END_ID"):
        if needed not in kinds:
            raise MissingIdColumn(f"{path}: no :{needed} column")
    if "TYPE" not in kinds and default_type is None:
        raise MissingIdColumn(f"{path}: no :TYPE column")
    s, d = kinds.index("START_ID"), kinds.index("END_ID")
    t = kinds.index("TYPE") if "TYPE" in kinds else None
    for lineno, row in rows:
        etype = row[t] if t is not None else default_type
        if not row[s] or not row[d] or not etype:
            raise MalformedRow(path, lineno, "empty start id, end id or type")
        yield EdgeRecord(row[s], row[d], etype, _attributes(path, lineno, columns, row))


def build_graph(node_records: Iterable[NodeRecord], edge_records: Iterable[EdgeRecord],
                report: ImportReport | None = None,
                max_dangling_fraction: float = 0.5) -> tuple[Graph, ImportReport]:
    """Merge node records by ``(labels, external_id)`` and resolve edges.

    The first record for a key wins; later duplicates only contribute
    attribute keys that are still missing. Conflicting values are counted
    in ``attribute_conflicts`` and dropped.
    """
    report = ImportReport() if report is None else report
    merged: dict[tuple[frozenset, str], NodeRecord] = {}
    for rec in node_records:
        report.records_read += 1
        key = (rec.labels, rec.external_id)
        first = merged.get(key)
        if first is None:
            merged[key] = NodeRecord(rec.external_id, rec.labels, dict(rec.attributes))
            continue
        report.merged_duplicates += 1
        for k, v in rec.attributes.items():
            if k not in first.attributes:
                first.attributes[k] = v
            elif first.attributes[k] != v:
                report.attribute_conflicts += 1

    graph = Graph()
    for rec in merged.values():
        graph.add_node(rec.labels, rec.attributes, rec.external_id)
    report.unique_nodes += len(merged)
    for label in list(graph.label_counts()):
        for key in DEFAULT_INDEXED_KEYS:
            if any(key in graph.node_attrs(n) for n in graph.nodes_with_label(label)):
                graph.register_index(label, key)

    for rec in edge_records:
        report.edge_records_read += 1
        src = graph.node_by_external_id(rec.start_external_id)
        dst = graph.node_by_external_id(rec.end_external_id)
        if src is None or dst is None:
            report.dangling_edges_skipped += 1
            continue
        graph.add_edge(src, dst, rec.type, rec.attributes)
        report.edges_created += 1
    if report.edge_records_read and \
            report.dangling_edges_skipped > max_dangling_fraction * report.edge_records_read:
        raise ImportAborted(
            f"{report.dangling_edges_skipped} of {report.edge_records_read} edges reference "
            "unknown node ids; are the node and edge files paired correctly?")
    return graph, report


def bulk_import(node_files: Iterable, edge_files: Iterable, layout: LayoutConfig = FULL,
                store: DictionaryStore | None = None
                ) -> tuple[Graph, DictionaryStore, ImportReport]:
    """Parse CSV files, build the merged graph and apply ``layout``."""
    def nodes():
        for path in node_files:
            yield from parse_node_csv(path)

    def edges():
        for path in edge_files:
            yield from parse_edge_csv(path)

    graph, report = build_graph(nodes(), edges())
    graph, store = apply_layout(graph, layout, store)
    return graph, store, report


def discover_csvs(directory) -> tuple[list[Path], list[Path]]:
    """Node and edge CSVs in a directory, by ``nodes*``/``edges*`` file-name prefix."""
    directory = Path(directory)
    nodes = sorted(directory.glob("nodes*.csv"))
    edges = sorted(directory.glob("edges*.csv"))
    return nodes, edges

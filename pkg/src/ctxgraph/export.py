"""Snapshots (CSV + dictionary TSV + manifest) and JSON Graph Format output."""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
from collections.abc import Iterable
from importlib import resources
from pathlib import Path

from .dictionary import FULL, DictionaryStore, LayoutConfig, get_layout, read_store, write_store
from .graph import Code, Graph
from .ingest import LIST_SEP, Column, build_graph, format_header, parse_edge_csv, parse_node_csv

MANIFEST = "manifest.json"
NODES_CSV = "nodes.csv"
EDGES_CSV = "edges.csv"
DICT_DIR = "dictionaries"


# -- CSV -------------------------------------------------------------------------------

def _kind(value) -> str:
    if isinstance(value, Code):
        return f"code({value.namespace})"
    if isinstance(value, bool):
        raise TypeError("booleans are not attribute values")
    if isinstance(value, int):
        return "int"
    if isinstance(value, _dt.date):
        return "date"
    if isinstance(value, tuple):
        return "string[]"
    return "string"


def _cell(value) -> str:
    if isinstance(value, Code):
        return str(value.code)
    if isinstance(value, _dt.date):
        return value.isoformat()
    if isinstance(value, tuple):
        for item in value:
            if LIST_SEP in item:
                raise ValueError(f"list item {item!r} contains the list separator")
        return LIST_SEP.join(value)
    return str(value)


def _columns(attr_maps: Iterable) -> list[Column]:
    seen: dict[tuple[str, str], None] = {}
    for attrs in attr_maps:
        for key, value in attrs.items():
            seen.setdefault((key, _kind(value)), None)
    return [Column(k, t) for k, t in sorted(seen)]


def _unique_external_ids(graph: Graph) -> bool:
    ids = [graph.external_id(n) for n in graph.nodes()]
    return all(ids) and len(set(ids)) == len(ids)


def write_graph_csvs(graph: Graph, directory, *, use_external_ids: bool | None = None
                     ) -> tuple[Path, Path]:
    """Write ``nodes.csv`` and ``edges.csv`` in id order.

    The ``:ID`` column holds external ids when every node has a distinct one,
    otherwise the numeric node id. Re-importing the pair with
    :func:`ctxgraph.ingest.bulk_import` reproduces node and edge ids.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if use_external_ids is None:
        use_external_ids = _unique_external_ids(graph)

    def ident(n):
        return graph.external_id(n) if use_external_ids else str(n)

    for n in graph.nodes():
        for label in graph.labels(n):
            if LIST_SEP in label:
                raise ValueError(f"label {label!r} contains the list separator")
    node_cols = _columns(graph.node_attrs(n) for n in graph.nodes())
    nodes_path = directory / NODES_CSV
    with open(nodes_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id:ID", ":LABEL"] + format_header(node_cols))
        for n in graph.nodes():
            attrs = graph.node_attrs(n)
            row = [ident(n), LIST_SEP.join(sorted(graph.labels(n)))]
            for col in node_cols:
                v = attrs.get(col.name)
                row.append("" if v is None or _kind(v) != col.type else _cell(v))
            w.writerow(row)
    edge_cols = _columns(graph.edge_attrs(e) for e in graph.edges())
    edges_path = directory / EDGES_CSV
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([":START_ID", ":END_ID", ":TYPE"] + format_header(edge_cols))
        for e in graph.edges():
            attrs = graph.edge_attrs(e)
            row = [ident(graph.edge_src(e)), ident(graph.edge_dst(e)), graph.edge_type(e)]
            for col in edge_cols:
                v = attrs.get(col.name)
                row.append("" if v is None or _kind(v) != col.type else _cell(v))
            w.writerow(row)
    return nodes_path, edges_path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def save_snapshot(graph: Graph, directory, layout: LayoutConfig = FULL,
                  store: DictionaryStore | None = None) -> dict:
    """Write a snapshot directory and return its manifest."""
    directory = Path(directory)
    nodes_path, edges_path = write_graph_csvs(graph, directory)
    files = [nodes_path, edges_path]
    if store is not None and len(store):
        files += write_store(store, directory / DICT_DIR)
    manifest = {
        "layout": layout.name,
        "node_count": graph.node_count,
        "edge_count": graph.edge_count,
        "labels": graph.label_counts(),
        "types": graph.type_counts(),
        "checksums": {str(p.relative_to(directory)): _sha256(p) for p in sorted(files)},
    }
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")
    return manifest


def load_snapshot(directory, verify: bool = True
                  ) -> tuple[Graph, DictionaryStore, LayoutConfig, dict]:
    """Read a snapshot written by :func:`save_snapshot`; codes stay encoded."""
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST).read_text(encoding="utf-8"))
    if verify:
        for rel, digest in manifest["checksums"].items():
            if _sha256(directory / rel) != digest:
                raise ValueError(f"checksum mismatch for {rel}")
    graph, _ = build_graph(parse_node_csv(directory / NODES_CSV),
                           parse_edge_csv(directory / EDGES_CSV))
    dict_dir = directory / DICT_DIR
    store = read_store(dict_dir) if dict_dir.is_dir() else DictionaryStore()
    return graph, store, get_layout(manifest["layout"].lower()), manifest


# -- JSON Graph Format ----------------------------------------------------------------------

SCHEMA_FILE = "json_graph.schema.json"


def _json_attrs(attrs, store):
    values, types = {}, {}
    for key in sorted(attrs):
        v = attrs[key]
        if isinstance(v, Code):
            if store is None:
                raise ValueError(f"attribute {key!r} is encoded; pass the dictionary store")
            v = store.decode_code(v)
        elif isinstance(v, tuple):
            v = [store.decode_code(x) if isinstance(x, Code) else x for x in v]
        if isinstance(v, _dt.date):
            types[key] = "date"
            v = v.isoformat()
        values[key] = v
    return values, types


def json_graph_document(graph: Graph, node_ids: Iterable[int] | None = None,
                        edge_ids: Iterable[int] | None = None,
                        store: DictionaryStore | None = None,
                        metadata: dict | None = None) -> dict:
    """JSON Graph Format document for the whole graph or a node/edge subset."""
    nodes = sorted(graph.nodes() if node_ids is None else set(node_ids))
    member = set(nodes)
    if edge_ids is None:
        edges = [e for e in graph.edges()
                 if graph.edge_src(e) in member and graph.edge_dst(e) in member]
    else:
        edges = sorted(set(edge_ids))
    node_docs = []
    for n in nodes:
        attrs, types = _json_attrs(graph.node_attrs(n), store)
        meta = {"labels": sorted(graph.labels(n)), "attributes": attrs}
        if types:
            meta["attribute_types"] = types
        if graph.external_id(n) is not None:
            meta["external_id"] = graph.external_id(n)
        node_docs.append({"id": str(n), "label": _display(graph, n, attrs), "metadata": meta})
    edge_docs = []
    for e in edges:
        s, d = graph.edge_src(e), graph.edge_dst(e)
        if s not in member or d not in member:
            raise ValueError(f"edge {e} references a node outside the exported set")
        attrs, types = _json_attrs(graph.edge_attrs(e), store)
        meta = {"id": e, "attributes": attrs}
        if types:
            meta["attribute_types"] = types
        edge_docs.append({"source": str(s), "target": str(d), "relation": graph.edge_type(e),
                          "directed": True, "metadata": meta})
    doc = {"graph": {"directed": True, "nodes": node_docs, "edges": edge_docs}}
    if metadata:
        doc["graph"]["metadata"] = metadata
    return doc


def _display(graph, n, attrs):
    for key in ("preferredLabel", "title", "name", "surname", "documentID"):
        if isinstance(attrs.get(key), str):
            return attrs[key]
    return str(graph.external_id(n) or n)


def result_document(graph: Graph, table, store: DictionaryStore | None = None) -> dict:
    """JSON Graph document for the subgraph a result table touches."""
    nodes, edges = table.subgraph(graph)
    meta = {"columns": list(table.columns), "row_count": len(table.rows)}
    meta.update({k: v for k, v in table.provenance.items() if isinstance(v, (str, int, float))})
    return json_graph_document(graph, nodes, edges, store, meta)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def export_json_graph(graph: Graph, result=None, store: DictionaryStore | None = None) -> str:
    """Serialise a graph, or the subgraph behind a result table, as JSON Graph text."""
    doc = json_graph_document(graph, store=store) if result is None \
        else result_document(graph, result, store)
    return dumps(doc)


def import_json_graph(text: str) -> Graph:
    """Rebuild a graph (attributes decoded) from JSON Graph text.

    Nodes are added in ascending numeric id order, so a whole-graph export
    re-imports with the same ids.
    """
    doc = json.loads(text)["graph"]
    graph = Graph()
    mapping = {}
    for node in sorted(doc["nodes"], key=lambda nd: _id_key(nd["id"])):
        meta = node.get("metadata", {})
        attrs = _from_json(meta.get("attributes", {}), meta.get("attribute_types", {}))
        labels = meta.get("labels") or [node.get("label", "Node")]
        mapping[node["id"]] = graph.add_node(labels, attrs, meta.get("external_id"))
    edges = doc.get("edges", [])
    edges = sorted(edges, key=lambda ed: ed.get("metadata", {}).get("id", 0))
    for edge in edges:
        meta = edge.get("metadata", {})
        attrs = _from_json(meta.get("attributes", {}), meta.get("attribute_types", {}))
        graph.add_edge(mapping[edge["source"]], mapping[edge["target"]],
                       edge.get("relation", "relatedTo"), attrs)
    return graph


def _id_key(ident: str):
    return (0, int(ident), "") if ident.isdigit() else (1, 0, ident)


def _from_json(attrs: dict, types: dict) -> dict:
    out = {}
    for key, v in attrs.items():
        if types.get(key) == "date":
            v = _dt.date.fromisoformat(v)
        elif isinstance(v, list):
            v = tuple(v)
        out[key] = v
    return out


def load_schema() -> dict:
    text = resources.files("ctxgraph").joinpath(SCHEMA_FILE).read_text(encoding="utf-8")
    return json.loads(text)


def validate_json_graph(doc: dict | str) -> None:
    """Raise ``jsonschema.ValidationError`` unless ``doc`` matches the bundled schema."""
    import jsonschema

    if isinstance(doc, str):
        doc = json.loads(doc)
    jsonschema.validate(doc, load_schema())
    ids = {n["id"] for n in doc["graph"]["nodes"]}
    for edge in doc["graph"]["edges"]:
        if edge["source"] not in ids or edge["target"] not in ids:
            raise jsonschema.ValidationError(
                f"edge {edge['source']}->{edge['target']} references an unknown node")


def metagraph_document(graph: Graph, metagraph, store: DictionaryStore | None = None) -> dict:
    """JSON Graph document of a context metagraph (context nodes, meta-edges)."""
    doc = json_graph_document(graph, sorted(metagraph.contexts), [], store)
    doc["graph"]["directed"] = False
    for (c1, c2), me in sorted(metagraph.meta_edges.items()):
        doc["graph"]["edges"].append({
            "source": str(c1), "target": str(c2), "relation": "metaEdge", "directed": False,
            "metadata": {"witness_count": me.witness_count,
                         "condition_mask": me.condition_mask},
        })
    doc["graph"]["metadata"] = {"kind": "context metagraph",
                                "contexts": len(metagraph.contexts),
                                "meta_edges": len(metagraph.meta_edges)}
    return doc

"""Embeddable labeled-property-graph engine with context metagraphs,
dictionary-encoded storage layouts, a path-query language and graph analytics."""

from .context import (ContextHypergraph, ContextModel, Metagraph, MetaEdge, build_context_hypergraph,
                      build_metagraph, con, enrich_graph, extended_context_subgraph)
from .dictionary import (FULL, LAYOUTS, POLY1, POLY2, Dictionary, DictionaryStore, LayoutConfig,
                         apply_layout, footprint, get_layout)
from .graph import Code, Edge, Graph, Node
from .ingest import ImportReport, bulk_import, parse_edge_csv, parse_node_csv
from .query import LayoutContext, ResultTable, eval_pattern, eval_rpq, evaluate, parse_query

__version__ = "0.1.0"

__all__ = [
    "Code", "ContextHypergraph", "ContextModel", "Dictionary", "DictionaryStore", "Edge", "FULL",
    "Graph", "ImportReport", "LAYOUTS", "LayoutConfig", "LayoutContext", "MetaEdge", "Metagraph",
    "Node", "POLY1", "POLY2", "ResultTable", "apply_layout", "build_context_hypergraph",
    "build_metagraph", "bulk_import", "con", "enrich_graph", "eval_pattern", "eval_rpq",
    "evaluate", "extended_context_subgraph", "footprint", "get_layout", "parse_edge_csv",
    "parse_node_csv", "parse_query",
]

"""Synthetic data, the query catalog and the layout comparison harness."""

from .catalog import CATALOG, QUERY_2_RESTRICTED, QueryCatalogEntry, parse_selection
from .generator import GeneratedGraph, GenParams, generate
from .harness import BenchReport, RunRecord, report_render, run_suite, timings_tsv

__all__ = [
    "BenchReport", "CATALOG", "GenParams", "GeneratedGraph", "QUERY_2_RESTRICTED",
    "QueryCatalogEntry", "RunRecord", "generate", "parse_selection", "report_render",
    "run_suite", "timings_tsv",
]

"""Query language: parsing, pattern matching, regular path queries and evaluation."""

from .ast import (AlgoSpec, Bindings, Chain, Condition, Count, Literal, NodeSpec, OrderItem,
                  PathAtom, PatternAtom, Prop, QuerySpec, ReturnItem, Var)
from .engine import ResultTable, eval_ecrpq, evaluate, format_cell, run_call
from .matcher import LayoutContext, PatternMatcher, eval_pattern
from .parser import format_query, parse_query
from .paths import DEFAULT_HOP_BOUND, Path, RPQSearch, eval_rpq, shortest_path
from .regex import Automaton, format_regex, parse_regex, reverse_regex

__all__ = [
    "AlgoSpec", "Automaton", "Bindings", "Chain", "Condition", "Count", "DEFAULT_HOP_BOUND",
    "LayoutContext", "Literal", "NodeSpec", "OrderItem", "Path", "PathAtom", "PatternAtom",
    "PatternMatcher", "Prop", "QuerySpec", "RPQSearch", "ResultTable", "ReturnItem", "Var",
    "eval_ecrpq", "eval_pattern", "eval_rpq", "evaluate", "format_cell", "format_query",
    "format_regex", "parse_query", "parse_regex", "reverse_regex", "run_call", "shortest_path",
]

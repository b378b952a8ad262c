"""Path regexes, automata, regular path queries and shortest paths."""

from __future__ import annotations

import itertools
import random
import re

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxgraph import Graph
from ctxgraph.errors import AutomatonTooLarge, QuerySyntaxError, TimedOut, UnknownNode
from ctxgraph.query import (Automaton, Path, eval_rpq, format_regex, parse_regex, reverse_regex,
                            shortest_path)
from ctxgraph.query.regex import Alt, Cat, Eps, Opt, Plus, Star, Sym, edge_types
from conftest import random_graph
from oracles import regex_to_re, rpq_oracle

SYMS = st.builds(Sym, st.sampled_from(["a", "b", "c", None]),
                 st.sampled_from(["out", "in", "both"]))


def _combine(children):
    multi = st.lists(children, min_size=2, max_size=3).map(tuple)
    return st.one_of(st.builds(Cat, multi), st.builds(Alt, multi), st.builds(Star, children),
                     st.builds(Plus, children), st.builds(Opt, children))


REGEXES = st.recursive(st.one_of(SYMS, st.just(Eps())), _combine, max_leaves=6)


def word_text(word):
    return "".join(f"{t}:{'o' if d == 'out' else 'i'};" for t, d in word)


class TestRegexSyntax:
    @pytest.mark.parametrize("text,ast", [
        ("isAuthor>", Sym("isAuthor", "out")),
        ("isAuthor<", Sym("isAuthor", "in")),
        ("_", Sym(None, "both")),
        ("a> b<", Cat((Sym("a", "out"), Sym("b", "in")))),
        ("a . b", Cat((Sym("a"), Sym("b")))),
        ("a|b*", Alt((Sym("a"), Star(Sym("b"))))),
        ("(a b)+", Plus(Cat((Sym("a"), Sym("b"))))),
        ("a?", Opt(Sym("a"))),
        ("()", Eps()),
    ])
    def test_parse(self, text, ast):
        assert parse_regex(text) == ast

    @pytest.mark.parametrize("text", ["a$", "(a", "a)"])
    def test_errors(self, text):
        with pytest.raises(QuerySyntaxError):
            parse_regex(text)

    def test_edge_types(self):
        assert edge_types(parse_regex("(a|_)* b<")) == {"a", "b"}

    @settings(max_examples=200, deadline=None)
    @given(REGEXES)
    def test_format_round_trip(self, ast):
        assert parse_regex(format_regex(ast)) == ast


class TestAutomaton:
    def test_too_large(self):
        with pytest.raises(AutomatonTooLarge):
            Automaton(parse_regex(" ".join(["a"] * 40)))

    def test_star_accepts_empty(self):
        assert Automaton(parse_regex("hasCitation>*")).accepts([])

    @settings(max_examples=150, deadline=None)
    @given(REGEXES, st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from(["out", "in"])),
                             max_size=6))
    def test_matches_re(self, ast, word):
        expected = re.fullmatch(regex_to_re(ast), word_text(word)) is not None
        assert Automaton(ast).accepts(word) == expected

    @settings(max_examples=150, deadline=None)
    @given(REGEXES, st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from(["out", "in"])),
                             max_size=6))
    def test_reverse(self, ast, word):
        flipped = [(t, "in" if d == "out" else "out") for t, d in reversed(word)]
        assert Automaton(reverse_regex(ast)).accepts(flipped) == Automaton(ast).accepts(word)


@pytest.fixture
def authorship():
    """Three authors; a0 and a1 share document d0, a1 and a2 share d1."""
    g = Graph()
    a = [g.add_node({"Author"}) for _ in range(3)]
    d = [g.add_node({"Document"}) for _ in range(3)]
    for au, doc in [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]:
        g.add_edge(a[au], d[doc], "isAuthor")
    g.add_edge(d[0], d[1], "hasCitation")
    g.add_edge(d[1], d[2], "hasCitation")
    return g, a, d


class TestEvalRPQ:
    def test_coauthor_pairs(self, authorship):
        g, a, _ = authorship
        pairs = eval_rpq(g, a, a, "isAuthor> isAuthor<")
        assert pairs == rpq_oracle(g, parse_regex("isAuthor> isAuthor<"), a, set(a), 0, 2)
        assert (a[0], a[1]) in pairs and (a[0], a[2]) not in pairs

    def test_zero_hops_star(self, authorship):
        g, _, d = authorship
        assert (d[0], d[0]) in eval_rpq(g, [d[0]], None, "hasCitation>*", min_hops=0)
        assert (d[0], d[0]) not in eval_rpq(g, [d[0]], None, "hasCitation>*", min_hops=1)

    def test_unreachable_excluded(self, authorship):
        g, _, d = authorship
        assert eval_rpq(g, [d[2]], [d[0]], "hasCitation>*") == set()

    def test_hop_bound(self, authorship):
        g, _, d = authorship
        assert (d[0], d[2]) not in eval_rpq(g, [d[0]], None, "hasCitation>*", max_hops=1)
        assert (d[0], d[2]) in eval_rpq(g, [d[0]], None, "hasCitation>*", max_hops=2)

    def test_bad_bounds(self, authorship):
        with pytest.raises(ValueError):
            eval_rpq(authorship[0], None, None, "a", min_hops=3, max_hops=2)

    def test_unknown_source(self, authorship):
        with pytest.raises(UnknownNode):
            eval_rpq(authorship[0], [99], None, "a")

    def test_deadline(self):
        g = random_graph(random.Random(1), 60, 600, types=("a",))
        with pytest.raises(TimedOut):
            eval_rpq(g, None, None, "a*", deadline=0.0)

    def test_witness_paths(self, authorship):
        g, a, _ = authorship
        found = eval_rpq(g, a, a, "(isAuthor> isAuthor<)*", witness=True)
        assert found[(a[0], a[0])] == Path((a[0],))
        path = found[(a[0], a[2])]
        assert path.is_valid(g) and len(path) == 4

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**6), ast=REGEXES, min_hops=st.integers(0, 2),
           max_hops=st.integers(2, 4))
    def test_matches_walk_enumeration(self, seed, ast, min_hops, max_hops):
        rng = random.Random(seed)
        n = rng.randint(1, 25)
        g = random_graph(rng, n, rng.randint(0, 2 * n))
        got = eval_rpq(g, None, None, ast, min_hops=min_hops, max_hops=max_hops)
        assert got == rpq_oracle(g, ast, None, None, min_hops, max_hops)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10**6), ast=REGEXES)
    def test_witness_is_shortest_accepted_walk(self, seed, ast):
        rng = random.Random(seed)
        g = random_graph(rng, 12, 20)
        aut = Automaton(ast)
        found = eval_rpq(g, None, None, ast, max_hops=4, witness=True)
        by_length = [rpq_oracle(g, ast, None, None, k, k) for k in range(5)]
        for (u, v), path in found.items():
            assert path.nodes[0] == u and path.nodes[-1] == v and path.is_valid(g)
            # each step's direction is fixed by the path, except a loop edge reads either way
            choices = []
            for i, e in enumerate(path.edges):
                t = g.edge_type(e)
                if g.edge_src(e) == g.edge_dst(e):
                    choices.append([(t, "out"), (t, "in")])
                elif g.edge_src(e) == path.nodes[i]:
                    choices.append([(t, "out")])
                else:
                    choices.append([(t, "in")])
            assert any(aut.accepts(list(word)) for word in itertools.product(*choices))
            assert min(k for k in range(5) if (u, v) in by_length[k]) == len(path)


def chain_graph():
    g = Graph()
    d = [g.add_node({"Document"}) for _ in range(3)]
    g.add_edge(d[0], d[1], "hasCitation")
    g.add_edge(d[1], d[2], "hasCitation")
    g.add_node({"Document"})
    return g, d


class TestShortestPath:
    def test_same_node(self):
        g, d = chain_graph()
        assert shortest_path(g, d[1], d[1]) == Path((d[1],))

    def test_chain(self):
        g, d = chain_graph()
        path = shortest_path(g, d[0], d[2], {"hasCitation"})
        assert len(path) == 2 and path.nodes == (d[0], d[1], d[2])

    def test_disconnected(self):
        g, d = chain_graph()
        assert shortest_path(g, d[0], 3) is None
        assert shortest_path(g, d[2], d[0]) is None
        assert len(shortest_path(g, d[2], d[0], direction="undirected")) == 2

    def test_unknown(self):
        g, d = chain_graph()
        with pytest.raises(UnknownNode):
            shortest_path(g, 0, 42)

    def test_type_filter(self):
        g, d = chain_graph()
        assert shortest_path(g, d[0], d[2], {"other"}) is None

    def test_lexicographic_tie_break(self):
        g = Graph()
        n = [g.add_node({"X"}) for _ in range(4)]
        for u, v in [(0, 2), (0, 1), (2, 3), (1, 3)]:
            g.add_edge(n[u], n[v], "t")
        assert shortest_path(g, n[0], n[3]).nodes == (0, 1, 3)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**6), undirected=st.booleans())
    def test_agrees_with_networkx_and_rpq(self, seed, undirected):
        rng = random.Random(seed)
        g = random_graph(rng, 20, rng.randint(0, 40), types=("a", "b"))
        ref = nx.MultiGraph() if undirected else nx.MultiDiGraph()
        ref.add_nodes_from(g.nodes())
        ref.add_edges_from((g.edge_src(e), g.edge_dst(e)) for e in g.edges()
                           if g.edge_type(e) == "a")
        regex = "a*" if undirected else "a>*"
        reach = eval_rpq(g, None, None, regex, max_hops=8, witness=True)
        for u, v in itertools.product(range(0, 20, 3), range(20)):
            path = shortest_path(g, u, v, {"a"}, "undirected" if undirected else "directed")
            if nx.has_path(ref, u, v):
                assert path is not None and path.is_valid(g)
                assert len(path) == nx.shortest_path_length(ref, u, v)
                if (u, v) in reach:
                    assert len(path) <= len(reach[(u, v)])
            else:
                assert path is None

"""Shared fixtures: a hand-built biomedical graph and random graph factories."""

from __future__ import annotations

import random

import pytest

from ctxgraph import Graph

EDGE_TYPES = ("a", "b", "c")


def build_bio_graph() -> Graph:
    """Small graph in the generator's schema with hand-countable facts.

    Entities 0-3, documents 4-5, authors 6-8. Document 4 carries three
    annotations, the three authors form a co-author chain with two edges and
    Entity.source takes three distinct values.
    """
    g = Graph()
    for label, key in [("Entity", "source"), ("Entity", "preferredLabel"),
                       ("Document", "documentID"), ("Author", "surname")]:
        g.register_index(label, key)
    app = g.add_node({"Entity"}, {"source": "HGNC", "preferredLabel": "APP"}, "hgnc:APP")
    ad = g.add_node({"Entity"}, {"source": "MESH", "preferredLabel": "Alzheimer Disease"},
                    "mesh:D000544")
    ds = g.add_node({"Entity"}, {"source": "MESH", "preferredLabel": "Down Syndrome"},
                    "mesh:D004314")
    gs = g.add_node({"Entity"}, {"source": "GO", "preferredLabel": "gamma-secretase"},
                    "go:0070765")
    d1 = g.add_node({"Document"}, {"documentID": "PMID:16160056", "source": "PubMed"},
                    "doc:16160056")
    d2 = g.add_node({"Document"}, {"documentID": "PMID:20000001", "source": "PMC"},
                    "doc:20000001")
    rothe = g.add_node({"Author"}, {"surname": "Rothe", "forename": "Ulrich"}, "au:rothe")
    castillo = g.add_node({"Author"}, {"surname": "Castillo", "forename": "A"}, "au:castillo")
    halden = g.add_node({"Author"}, {"surname": "Halden", "forename": "Mira"}, "au:halden")
    for e in (app, ad, ds):
        g.add_edge(d1, e, "hasAnnotation")
    g.add_edge(d2, app, "hasAnnotation")
    g.add_edge(app, gs, "hasRelation", {"function": "increases", "context": "PMID:16160056"})
    for a in (rothe, castillo):
        g.add_edge(a, d1, "isAuthor")
    g.add_edge(halden, d2, "isAuthor")
    g.add_edge(rothe, castillo, "isCoAuthor")
    g.add_edge(castillo, halden, "isCoAuthor")
    return g


@pytest.fixture
def bio_graph() -> Graph:
    return build_bio_graph()


def random_graph(rng: random.Random, n: int, m: int, types=EDGE_TYPES,
                 labels=("X", "Y")) -> Graph:
    """``n`` nodes, ``m`` uniformly random typed edges (loops and multi-edges allowed)."""
    g = Graph()
    for i in range(n):
        g.add_node({rng.choice(labels)}, {"k": rng.randrange(5), "name": f"n{i}"}, f"x{i}")
    for _ in range(m if n else 0):
        g.add_edge(rng.randrange(n), rng.randrange(n), rng.choice(types),
                   {"w": rng.randrange(3)})
    return g


@pytest.fixture
def rng() -> random.Random:
    return random.Random(12345)


CONTEXT_TYPES = ("hasAnnotation", "hasAffiliation", "publishedIn")
OTHER_TYPES = ("hasCitation", "isCoAuthor", "hasRelation")
RESOLVERS = {("hasRelation", "context"): ("Document", "documentID")}


def random_context_graph(rng: random.Random, n: int, m: int) -> Graph:
    """Random graph mixing context and plain edge types.

    Roughly a third of the nodes are documents; ``hasRelation`` edges carry a
    ``context`` naming a random document id, sometimes one that does not
    exist, so edge contexts are exercised together with unresolved ones.
    """
    g = Graph()
    g.register_index("Document", "documentID")
    docs = []
    for i in range(n):
        if rng.random() < 0.35:
            docs.append(i)
            g.add_node({"Document"}, {"documentID": f"PMID:{i}"}, f"d{i}")
        else:
            g.add_node({rng.choice(["Entity", "Author"])}, {"name": f"n{i}"}, f"n{i}")
    if n == 0:
        return g
    for _ in range(m):
        etype = rng.choice(CONTEXT_TYPES + OTHER_TYPES)
        attrs = {}
        if etype == "hasRelation" and rng.random() < 0.8:
            target = rng.choice(docs) if docs and rng.random() < 0.9 else n + 1000
            attrs["context"] = f"PMID:{target}"
        g.add_edge(rng.randrange(n), rng.randrange(n), etype, attrs)
    return g


@pytest.fixture(scope="session")
def generated():
    """The default-scale synthetic graph, built once per session."""
    from ctxgraph.bench import GenParams, generate

    return generate(GenParams(scale=1e-4, seed=1))


# -- acceptance reporting -------------------------------------------------------------
# Tests marked ``criterion(number, title)`` are tallied; the terminal summary then
# prints one pass/fail line per criterion.

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": 0, "failed": 0,
                                          "seconds": 0.0})
    entry["seconds"] += report.duration
    if report.when == "call" and report.passed:
        entry["passed"] += 1
    elif report.failed:
        entry["failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        verdict = "PASS" if entry["failed"] == 0 and entry["passed"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number}: {verdict}  {entry['title']}  "
            f"({entry['passed']} passed, {entry['failed']} failed, {entry['seconds']:.1f} s)")

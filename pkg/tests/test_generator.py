"""Synthetic graph generation: counts, schema shape, planted facts and determinism."""

from __future__ import annotations

import datetime as dt
from collections import Counter

import pytest

from ctxgraph.bench import GenParams, generate
from ctxgraph.bench.generator import FUNCTIONS, PLANTED_ENTITIES
from ctxgraph.errors import ScaleTooSmall

# default node ratios scaled to 1e-4
EXPECTED_NODES = {"Document": 3000, "Author": 1700, "Affiliation": 2100, "Entity": 500}


def within(value, target, rel=0.05):
    return abs(value - target) <= rel * target


class TestParams:
    def test_counts(self):
        assert GenParams().counts() == {
            "documents": 3000, "authors": 1700, "affiliations": 2100, "entities": 500,
            "annotation_edges": 55400, "total_edges": 85000}

    @pytest.mark.parametrize("scale", [10 / 30e6, 0.0, -1.0, 7e-6, 8e-6])
    def test_too_small(self, scale):
        # the last two leave too few entities for the annotation density
        with pytest.raises(ScaleTooSmall):
            generate(GenParams(scale=scale))

    def test_smallest_supported_scale(self):
        assert generate(GenParams(scale=1e-5)).graph.node_count > 0


class TestShape:
    def test_node_counts(self, generated):
        g = generated.graph
        labels = Counter(label for n in g.nodes() for label in g.labels(n))
        for label, target in EXPECTED_NODES.items():
            assert within(labels[label], target), label

    def test_edge_counts(self, generated):
        types = generated.graph.type_counts()
        assert within(types["hasAnnotation"], 55400)
        assert within(generated.graph.edge_count, 85000)

    def test_documents(self, generated):
        g = generated.graph
        docs = g.find_nodes("Document")
        sources = Counter(g.node_attrs(d)["source"] for d in docs)
        assert set(sources) == {"PubMed", "PMC"}
        assert abs(sources["PMC"] / len(docs) - 0.12) < 0.03
        for d in docs:
            attrs = g.node_attrs(d)
            assert isinstance(attrs["publicationDate"], dt.date)
            assert attrs["documentID"].startswith("PMID:")
            authors = g.typed_in(d, "isAuthor")
            assert 1 <= len(authors) <= 15
            assert len(g.typed_out(d, "publishedIn")) == 1
            assert len(g.typed_out(d, "hasPublicationType")) >= 1

    def test_unique_document_ids(self, generated):
        g = generated.graph
        ids = [g.node_attrs(d)["documentID"] for d in g.find_nodes("Document")]
        assert len(ids) == len(set(ids))

    def test_citations_leave_pmc_documents(self, generated):
        g = generated.graph
        for e in g.edges():
            if g.edge_type(e) == "hasCitation":
                assert g.node_attrs(g.edge_src(e))["source"] == "PMC"
                assert "Document" in g.labels(g.edge_dst(e))

    def test_relations(self, generated):
        g = generated.graph
        doc_ids = {g.node_attrs(d)["documentID"] for d in g.find_nodes("Document")}
        rels = [e for e in g.edges() if g.edge_type(e) == "hasRelation"]
        assert rels
        unsourced = 0
        for e in rels:
            attrs = g.edge_attrs(e)
            assert attrs["function"] in FUNCTIONS
            assert "Entity" in g.labels(g.edge_src(e)) and "Entity" in g.labels(g.edge_dst(e))
            if "context" in attrs:
                assert attrs["context"] in doc_ids
            else:
                unsourced += 1
        # two planted statements carry no source document
        assert unsourced == 2

    def test_planted_entities(self, generated):
        g = generated.graph
        by_name = generated.planted["entities"]
        for name, source, _ in PLANTED_ENTITIES:
            attrs = g.node_attrs(by_name[name])
            assert (attrs["preferredLabel"], attrs["source"]) == (name, source)

    def test_earliest_author(self, generated):
        g = generated.graph
        author = generated.planted["earliest_author"]
        assert g.node_attrs(author)["surname"] == "Halden"
        earliest = min(g.node_attrs(d)["publicationDate"] for d in g.find_nodes("Document"))
        doc = generated.planted["earliest_document"]
        assert g.node_attrs(doc)["publicationDate"] == earliest


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        a = generate(GenParams(seed=4), tmp_path / "a")
        b = generate(GenParams(seed=4), tmp_path / "b")
        for name in ("nodes.csv", "edges.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert a.planted == b.planted

    def test_other_seed_differs(self, tmp_path):
        generate(GenParams(seed=4), tmp_path / "a")
        generate(GenParams(seed=5), tmp_path / "b")
        assert (tmp_path / "a" / "edges.csv").read_bytes() != \
            (tmp_path / "b" / "edges.csv").read_bytes()

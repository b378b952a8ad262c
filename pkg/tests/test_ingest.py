"""CSV parsing, node merging and layout-aware bulk import."""

from __future__ import annotations

import datetime as dt
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxgraph import FULL, POLY1, POLY2, Code, bulk_import, parse_edge_csv, parse_node_csv
from ctxgraph.dictionary import decode_all
from ctxgraph.errors import ImportAborted, MalformedRow, MissingIdColumn
from ctxgraph.ingest import (EdgeRecord, NodeRecord, build_graph, discover_csvs, parse_cell,
                             parse_header)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def dup_files(tmp_path):
    """Ten node rows, three of them repeating an earlier id."""
    nodes = write(tmp_path / "nodes.csv",
                  "id:ID,name,year:int,:LABEL\n"
                  "a,Alpha,2001,Document\n"
                  "b,Beta,2002,Document\n"
                  "c,Gamma,,Document\n"
                  "d,Delta,2004,Author\n"
                  "e,Eps,2005,Author\n"
                  "f,Phi,2006,Author\n"
                  "g,Gee,2007,Entity\n"
                  "a,Other,2001,Document\n"
                  "c,Gamma,2003,Document\n"
                  "g,Gee,2007,Entity\n")
    edges = write(tmp_path / "edges.csv",
                  ":START_ID,:END_ID,:TYPE,function\n"
                  "d,a,isAuthor,\n"
                  "a,g,hasAnnotation,\n"
                  "g,g,hasRelation,increases\n"
                  "g,g,hasRelation,increases\n")
    return nodes, edges


class TestParsing:
    def test_node_row(self, tmp_path):
        path = write(tmp_path / "n.csv", "id:ID,title,:LABEL\nd1,Alpha,Document\n")
        assert list(parse_node_csv(path)) == [NodeRecord("d1", frozenset({"Document"}),
                                                         {"title": "Alpha"})]

    def test_header_only(self, tmp_path):
        assert list(parse_node_csv(write(tmp_path / "n.csv", "id:ID,:LABEL\n"))) == []

    def test_short_row(self, tmp_path):
        path = write(tmp_path / "n.csv", "id:ID,title,:LABEL\nd1,Alpha\n")
        with pytest.raises(MalformedRow) as info:
            list(parse_node_csv(path))
        assert "2" in str(info.value)

    def test_missing_id_column(self, tmp_path):
        with pytest.raises(MissingIdColumn):
            list(parse_node_csv(write(tmp_path / "n.csv", "title,:LABEL\nx,Y\n")))

    def test_edge_row(self, tmp_path):
        path = write(tmp_path / "e.csv", ":START_ID,:END_ID,:TYPE\nd1,e7,hasAnnotation\n")
        assert list(parse_edge_csv(path)) == [EdgeRecord("d1", "e7", "hasAnnotation", {})]

    def test_edge_attribute(self, tmp_path):
        path = write(tmp_path / "e.csv",
                     ":START_ID,:END_ID,:TYPE,function\na,b,hasRelation,increases\n")
        assert next(parse_edge_csv(path)).attributes == {"function": "increases"}

    def test_missing_type_column(self, tmp_path):
        with pytest.raises(MissingIdColumn):
            list(parse_edge_csv(write(tmp_path / "e.csv", ":START_ID,:END_ID\na,b\n")))

    def test_header_spec_overrides(self, tmp_path):
        path = write(tmp_path / "n.csv", "x,y,z\nd1,5,Document\n")
        rec = next(parse_node_csv(path, ["id:ID", "n:int", ":LABEL"]))
        assert rec.attributes == {"n": 5}

    def test_quoted_cells(self, tmp_path):
        path = write(tmp_path / "n.csv", 'id:ID,title,:LABEL\nd1,"a, ""b""",Document\n')
        assert next(parse_node_csv(path)).attributes == {"title": 'a, "b"'}

    def test_multiple_labels(self, tmp_path):
        path = write(tmp_path / "n.csv", "id:ID,:LABEL\nx,Entity;Gene\n")
        assert next(parse_node_csv(path)).labels == {"Entity", "Gene"}

    @pytest.mark.parametrize("cell,expected", [
        ("name", ("name", "string")), ("n:int", ("n", "int")), ("n:long", ("n", "int")),
        ("d:date", ("d", "date")), ("t:string[]", ("t", "string[]")), (":ID", ("", "ID")),
        ("s:code(Entity.source)", ("s", "code(Entity.source)"))])
    def test_header_cells(self, cell, expected):
        col = parse_header([cell])[0]
        assert (col.name, col.type) == expected

    def test_unknown_header_type(self):
        with pytest.raises(ValueError):
            parse_header(["x:float"])

    @pytest.mark.parametrize("text,kind,value", [
        ("12", "int", 12), ("2020-02-29", "date", dt.date(2020, 2, 29)),
        ("a;b", "string[]", ("a", "b")), ("4", "code(ns)", Code("ns", 4)), ("x", "string", "x")])
    def test_cells(self, text, kind, value):
        assert parse_cell(text, kind) == value

    def test_bad_int_cell_is_malformed(self, tmp_path):
        path = write(tmp_path / "n.csv", "id:ID,n:int,:LABEL\nx,abc,X\n")
        with pytest.raises(MalformedRow):
            list(parse_node_csv(path))


class TestBulkImport:
    def test_merge_counts(self, dup_files):
        g, _, report = bulk_import([dup_files[0]], [dup_files[1]])
        assert (report.records_read, report.unique_nodes, report.merged_duplicates) == (10, 7, 3)
        assert report.unique_nodes + report.merged_duplicates == report.records_read

    def test_first_record_wins_and_fills_gaps(self, dup_files):
        g, _, report = bulk_import([dup_files[0]], [dup_files[1]])
        a = g.node_by_external_id("a")
        c = g.node_by_external_id("c")
        assert g.node_attrs(a)["name"] == "Alpha"
        assert g.node_attrs(c)["year"] == 2003
        assert report.attribute_conflicts == 1

    def test_parallel_edges_kept(self, dup_files):
        g, _, report = bulk_import([dup_files[0]], [dup_files[1]])
        assert g.type_counts()["hasRelation"] == 2
        assert report.edges_created == 4

    def test_dangling_edge_skipped(self, tmp_path):
        nodes = write(tmp_path / "n.csv", "id:ID,:LABEL\na,X\nb,X\n")
        edges = write(tmp_path / "e.csv", ":START_ID,:END_ID,:TYPE\na,b,t\na,b,t\na,x,t\n")
        g, _, report = bulk_import([nodes], [edges])
        assert report.dangling_edges_skipped == 1 and g.edge_count == 2

    def test_mostly_dangling_aborts(self, tmp_path):
        nodes = write(tmp_path / "n.csv", "id:ID,:LABEL\na,X\n")
        edges = write(tmp_path / "e.csv", ":START_ID,:END_ID,:TYPE\na,a,t\na,x,t\na,y,t\n")
        with pytest.raises(ImportAborted):
            bulk_import([nodes], [edges])

    def test_layouts_share_topology(self, dup_files):
        g_full, _, _ = bulk_import([dup_files[0]], [dup_files[1]], FULL)
        g_poly, store, _ = bulk_import([dup_files[0]], [dup_files[1]], POLY2)
        rel = [e for e in g_poly.edges() if g_poly.edge_type(e) == "hasRelation"][0]
        assert isinstance(g_poly.edge_attrs(rel)["function"], Code)
        plain = decode_all(g_poly, store)
        for e in g_full.edges():
            assert (g_full.edge_src(e), g_full.edge_dst(e), g_full.edge_type(e),
                    dict(g_full.edge_attrs(e))) == (plain.edge_src(e), plain.edge_dst(e),
                                                    plain.edge_type(e), dict(plain.edge_attrs(e)))
        for n in g_full.nodes():
            assert dict(g_full.node_attrs(n)) == dict(plain.node_attrs(n))

    def test_deterministic(self, dup_files):
        a = bulk_import([dup_files[0]], [dup_files[1]], POLY1)
        b = bulk_import([dup_files[0]], [dup_files[1]], POLY1)
        assert a[1] == b[1] and a[2] == b[2]
        assert [dict(a[0].node_attrs(n)) for n in a[0].nodes()] == \
            [dict(b[0].node_attrs(n)) for n in b[0].nodes()]

    def test_indexes_registered(self, tmp_path):
        nodes = write(tmp_path / "n.csv", "id:ID,surname,:LABEL\nx,Rothe,Author\n")
        g, _, _ = bulk_import([nodes], [])
        assert ("Author", "surname") in g.indexed_keys()

    def test_discover(self, tmp_path):
        for name in ["nodes_a.csv", "nodes.csv", "edges.csv", "other.csv"]:
            write(tmp_path / name, "")
        nodes, edges = discover_csvs(tmp_path)
        assert [p.name for p in nodes] == ["nodes.csv", "nodes_a.csv"]
        assert [p.name for p in edges] == ["edges.csv"]


class TestMergeProperties:
    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(1, 15), dups=st.integers(0, 10),
           m=st.integers(0, 30))
    def test_row_order_does_not_change_topology(self, seed, n, dups, m):
        rng = random.Random(seed)
        records = [NodeRecord(f"id{i}", frozenset({"X"}), {"v": str(i)}) for i in range(n)]
        records += [NodeRecord(f"id{rng.randrange(n)}", frozenset({"X"}), {"w": "dup"})
                    for _ in range(dups)]
        edges = [EdgeRecord(f"id{rng.randrange(n)}", f"id{rng.randrange(n)}", "t")
                 for _ in range(m)]
        shuffled = records[:]
        rng.shuffle(shuffled)
        g1, r1 = build_graph(records, edges)
        g2, r2 = build_graph(shuffled, edges)
        assert (r1.unique_nodes, r1.merged_duplicates) == (r2.unique_nodes, r2.merged_duplicates)

        def ext_edges(g):
            return sorted((g.external_id(g.edge_src(e)), g.external_id(g.edge_dst(e)))
                          for e in g.edges())
        assert ext_edges(g1) == ext_edges(g2)
        assert {g1.external_id(v) for v in g1.nodes()} == {g2.external_id(v) for v in g2.nodes()}

"""The ``ctxgraph`` command line, driven in-process through ``cli_dispatch``."""

from __future__ import annotations

import io
import json

import pytest

from ctxgraph.cli import DEADLINE_ENV, GRAMMAR, cli_dispatch
from ctxgraph.export import validate_json_graph, write_graph_csvs
from conftest import build_bio_graph


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_dispatch([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def csv_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    write_graph_csvs(build_bio_graph(), out)
    return out


@pytest.fixture(scope="module")
def snapshot(csv_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("snap") / "poly2"
    code, stdout, _ = run("import", "--dir", csv_dir, "--layout", "poly2", "--out", out)
    assert code == 0
    return out


class TestImportAndStats:
    def test_import_report(self, csv_dir, tmp_path):
        code, out, _ = run("import", "--nodes", csv_dir / "nodes.csv", "--edges",
                           csv_dir / "edges.csv", "--out", tmp_path / "s")
        report = json.loads(out)
        assert code == 0 and report["unique_nodes"] == 9 and report["edges_created"] == 10
        assert (tmp_path / "s" / "manifest.json").exists()

    def test_import_needs_nodes(self, tmp_path):
        code, _, err = run("import", "--out", tmp_path / "s")
        assert code == 1 and "usage error" in err

    def test_stats(self, snapshot):
        code, out, _ = run("stats", "--graph", snapshot)
        stats = json.loads(out)
        assert code == 0 and stats["layout"] == "Poly2"
        assert (stats["nodes"], stats["edges"]) == (9, 10)
        assert stats["labels"] == {"Author": 3, "Document": 2, "Entity": 4}
        assert stats["types"]["hasAnnotation"] == 4

    def test_stats_from_csv_dir(self, csv_dir):
        code, out, _ = run("stats", "--graph", csv_dir, "--layout", "poly1")
        assert code == 0 and json.loads(out)["layout"] == "Poly1"

    def test_missing_graph(self, tmp_path):
        code, _, err = run("stats", "--graph", tmp_path / "nope")
        assert code == 2 and "does not exist" in err


class TestQuery:
    TEXT = 'MATCH (a:Author)-[:isAuthor]->(d:Document) RETURN a.surname, d ORDER BY a.surname LIMIT 10'

    def test_tsv(self, snapshot):
        code, out, _ = run("query", "--graph", snapshot, "--q", self.TEXT)
        assert code == 0
        assert out == "a.surname\td\nCastillo\t4\nHalden\t5\nRothe\t4\n"

    @pytest.mark.parametrize("layout", ["full", "poly1", "poly2"])
    def test_json_any_layout(self, snapshot, layout):
        text = "MATCH (a:Author)-[r:isAuthor]->(d:Document) RETURN a, r, d"
        code, out, _ = run("query", "--graph", snapshot, "--layout", layout, "--q", text,
                           "--format", "json")
        doc = json.loads(out)
        validate_json_graph(doc)
        assert code == 0 and len(doc["graph"]["nodes"]) == 5 and len(doc["graph"]["edges"]) == 3
        names = {n["metadata"]["attributes"].get("surname") for n in doc["graph"]["nodes"]}
        assert {"Rothe", "Castillo", "Halden"} <= names

    def test_syntax_error(self, snapshot):
        code, _, err = run("query", "--graph", snapshot, "--q", "MATCH (a RETURN a")
        assert code == 1 and "line 1, column" in err and GRAMMAR in err

    def test_timeout(self, snapshot, monkeypatch):
        monkeypatch.setenv(DEADLINE_ENV, "1e-9")
        code, _, err = run("query", "--graph", snapshot, "--q", self.TEXT)
        assert code == 3 and "timed out" in err

    @pytest.mark.parametrize("value", ["soon", "0", "-4"])
    def test_bad_deadline(self, snapshot, monkeypatch, value):
        monkeypatch.setenv(DEADLINE_ENV, value)
        assert run("query", "--graph", snapshot, "--q", self.TEXT)[0] == 1

    def test_call(self, snapshot):
        code, out, _ = run("query", "--graph", snapshot, "--q",
                           "CALL degree(edges='isCoAuthor', direction='undirected', top=1)")
        assert code == 0 and out.splitlines() == ["node\tscore", "7\t2.0"]

    def test_disconnected_flag(self, snapshot):
        text = "MATCH (a:Author), (d:Document) RETURN a, d"
        assert run("query", "--graph", snapshot, "--q", text)[0] == 2
        code, out, _ = run("query", "--graph", snapshot, "--q", text, "--allow-disconnected")
        assert code == 0 and len(out.splitlines()) == 1 + 3 * 2


class TestUsage:
    def test_unknown_command(self):
        code, _, err = run("frobnicate")
        assert code == 1 and "usage" in err

    def test_no_command(self):
        assert run()[0] == 1

    def test_missing_required(self):
        assert run("query", "--q", "MATCH (a) RETURN a")[0] == 1


class TestExport:
    @pytest.mark.parametrize("fmt", ["json", "csv", "snapshot"])
    def test_formats(self, snapshot, tmp_path, fmt):
        target = tmp_path / "out"
        code, _, _ = run("export", "--graph", snapshot, "--format", fmt, "--out", target)
        assert code == 0
        if fmt == "json":
            doc = json.loads(target.read_text())
            validate_json_graph(doc)
            assert len(doc["graph"]["nodes"]) == 9
        else:
            assert (target / "nodes.csv").exists()
            code, out, _ = run("stats", "--graph", target)
            assert json.loads(out)["edges"] == 10


class TestContextCommands:
    def test_metagraph_stdout(self, snapshot):
        code, out, _ = run("metagraph", "--graph", snapshot)
        doc = json.loads(out)
        validate_json_graph(doc)
        assert code == 0 and doc["graph"]["metadata"]["kind"] == "context metagraph"

    def test_metagraph_scoped_to_file(self, snapshot, tmp_path):
        code, out, _ = run("metagraph", "--graph", snapshot, "--scope",
                           'MATCH (d:Document{documentID="PMID:16160056"}) RETURN d',
                           "--out", tmp_path / "mg.json")
        assert code == 0 and "meta-edges" in out
        validate_json_graph(json.loads((tmp_path / "mg.json").read_text()))

    def test_scope_must_be_one_node_column(self, snapshot):
        code, _, _ = run("metagraph", "--graph", snapshot, "--scope",
                         "MATCH (a)-[r:isAuthor]->(d) RETURN a, d")
        assert code == 1

    def test_metagraph_timeout_hint(self, snapshot, monkeypatch):
        monkeypatch.setenv(DEADLINE_ENV, "1e-9")
        code, _, err = run("metagraph", "--graph", snapshot)
        assert code == 3 and "--scope" in err

    def test_enrich(self, snapshot, tmp_path):
        code, out, _ = run("enrich", "--graph", snapshot, "--out", tmp_path / "e")
        added = json.loads(out)["edges_added"]
        assert code == 0 and added > 0
        stats = json.loads(run("stats", "--graph", tmp_path / "e")[1])
        assert stats["types"]["sharesContext"] == added and stats["layout"] == "Poly2"


class TestBench:
    def test_generate_and_run(self, tmp_path):
        data = tmp_path / "data"
        code, out, _ = run("--seed", 3, "bench", "generate", "--scale", 1e-5, "--out", data)
        assert code == 0 and json.loads(out)["nodes"] > 0
        code, out, _ = run("bench", "run", "--data", data, "--queries", "1,2,26", "--reps", 1,
                           "--report", tmp_path / "r.tsv", "--markdown", tmp_path / "r.md",
                           "--timings", tmp_path / "t.tsv")
        assert code == 0
        assert out.startswith("| Query | Poly1 % | Poly2 % | Class |")
        assert (tmp_path / "r.tsv").read_text().splitlines()[-1].startswith("Average")
        assert len((tmp_path / "t.tsv").read_text().splitlines()) == 4

    def test_generate_reproducible(self, tmp_path):
        for name in ("a", "b"):
            assert run("--seed", 9, "generate", "--scale", 1e-5, "--out", tmp_path / name)[0] == 0
        assert (tmp_path / "a" / "edges.csv").read_bytes() == \
            (tmp_path / "b" / "edges.csv").read_bytes()

    def test_bad_selection(self, tmp_path):
        assert run("bench", "run", "--data", tmp_path, "--queries", "99")[0] == 1

    def test_bench_timeout(self, tmp_path, monkeypatch):
        data = tmp_path / "data"
        run("bench", "generate", "--scale", 1e-5, "--out", data)
        monkeypatch.setenv(DEADLINE_ENV, "1e-9")
        assert run("bench", "run", "--data", data, "--queries", "2", "--reps", 1)[0] == 3

    def test_scale_too_small(self, tmp_path):
        code, _, err = run("generate", "--scale", 1e-7, "--out", tmp_path)
        assert code == 2 and "scale" in err

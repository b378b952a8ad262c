"""Layout comparison: import per layout, verify equal answers, then time."""

from __future__ import annotations

import statistics
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from ..dictionary import FULL, FootprintReport, LayoutConfig, footprint, get_layout
from ..errors import EquivalenceViolation, TimedOut
from ..ingest import bulk_import, discover_csvs
from ..query import LayoutContext, evaluate
from .catalog import BY_NUMBER, QueryCatalogEntry

DISPLAY_CLASS = {
    "CRPQ": "CRPQ",
    "ECRPQ": "ECRPQ",
    "RPQ": "RPQ",
    "ShortestPath": "Shortest Path",
    "PageRank": "Page Rank",
    "Betweenness": "Betweenness Centrality",
    "Degree": "Degree Centrality",
    "Louvain": "Louvain Modularity",
    "Components": "Connected Components",
}
MISSING = "—"


@dataclass
class RunRecord:
    status: str                       # "ok", "timeout" or "error"
    times: list[float] = field(default_factory=list)
    rows: int = 0
    message: str = ""

    @property
    def median(self) -> float | None:
        return statistics.median(self.times) if self.status == "ok" and self.times else None


@dataclass
class BenchReport:
    layouts: list[str]
    queries: list[int]
    repetitions: int
    runs: dict[tuple[int, str], RunRecord] = field(default_factory=dict)
    classes: dict[int, str] = field(default_factory=dict)
    footprints: dict[str, FootprintReport] = field(default_factory=dict)
    import_seconds: dict[str, float] = field(default_factory=dict)

    def median(self, number: int, layout: str) -> float | None:
        rec = self.runs.get((number, layout))
        return None if rec is None else rec.median

    def percent_decrease(self, number: int, layout: str, baseline: str = "Full") -> float | None:
        """``(t_full - t_layout) / t_full * 100`` for completed runs, else ``None``."""
        t_full = self.median(number, baseline)
        t = self.median(number, layout)
        if t_full is None or t is None or t_full <= 0:
            return None
        return (t_full - t) / t_full * 100.0


def _load(source, layout: LayoutConfig):
    if isinstance(source, (str, Path)):
        nodes, edges = discover_csvs(source)
    else:
        nodes, edges = source
    if not nodes:
        raise FileNotFoundError(f"no nodes*.csv files under {source}")
    graph, store, _ = bulk_import(nodes, edges, layout)
    return graph, store


def run_suite(graph_csvs, layouts: Sequence[LayoutConfig | str] = ("full", "poly1", "poly2"),
              catalog: Iterable[int | QueryCatalogEntry] | None = None, repetitions: int = 3,
              deadline_secs: float | None = 60.0, verify: bool = True,
              progress=None) -> BenchReport:
    """Import ``graph_csvs`` once per layout and time every selected catalog query.

    ``graph_csvs`` is a directory holding ``nodes*.csv``/``edges*.csv`` or a
    ``(node_files, edge_files)`` pair. Answers are compared across layouts
    before any timing is taken; a disagreement raises
    :class:`EquivalenceViolation`.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    configs = [get_layout(x) for x in layouts]
    if FULL.name not in [c.name for c in configs]:
        configs.insert(0, FULL)
    entries = [BY_NUMBER[x] if isinstance(x, int) else x
               for x in (catalog if catalog is not None else sorted(BY_NUMBER))]
    report = BenchReport([c.name for c in configs], [e.number for e in entries], repetitions,
                         classes={e.number: e.cls for e in entries})
    loaded = {}
    for cfg in configs:
        start = time.perf_counter()
        graph, store = _load(graph_csvs, cfg)
        report.import_seconds[cfg.name] = time.perf_counter() - start
        report.footprints[cfg.name] = footprint(graph, store, cfg)
        loaded[cfg.name] = (graph, LayoutContext(store, cfg, deadline_secs))

    answers: dict[tuple[int, str], object] = {}
    for entry in entries:
        for cfg in configs:
            graph, ctx = loaded[cfg.name]
            rec = RunRecord("ok")
            try:
                table = evaluate(graph, entry.text, ctx)
                rec.rows = len(table.rows)
                answers[(entry.number, cfg.name)] = table.multiset()
            except TimedOut as exc:
                rec.status, rec.message = "timeout", str(exc)
            except Exception as exc:  # recorded per query, the suite goes on
                rec.status, rec.message = "error", f"{type(exc).__name__}: {exc}"
            report.runs[(entry.number, cfg.name)] = rec
        if verify:
            done = [answers[(entry.number, c.name)] for c in configs
                    if (entry.number, c.name) in answers]
            if any(d != done[0] for d in done[1:]):
                raise EquivalenceViolation(f"query {entry.number} answers differ between layouts")

    for entry in entries:
        for cfg in configs:
            rec = report.runs[(entry.number, cfg.name)]
            if rec.status != "ok":
                continue
            graph, ctx = loaded[cfg.name]
            for _ in range(repetitions):
                start = time.perf_counter()
                evaluate(graph, entry.text, ctx)
                rec.times.append(time.perf_counter() - start)
            if progress is not None:
                progress(entry.number, cfg.name, rec)
    return report


def _pct(value: float | None) -> str:
    return MISSING if value is None else f"{value:.1f}%"


def report_render(report: BenchReport, baseline: str = "Full") -> tuple[str, str]:
    """Percent-decrease table as ``(tsv, markdown)``.

    One row per query, sorted by the first non-baseline layout's decrease
    (largest first, missing values last), then an ``Average`` row over the
    completed cells of each column.
    """
    others = [name for name in report.layouts if name != baseline]
    lead = others[0] if others else None

    def sort_key(number):
        v = report.percent_decrease(number, lead, baseline) if lead else None
        return (v is None, -(v or 0.0), number)

    ordered = sorted(report.queries, key=sort_key)
    header = ["Query"] + [f"{name} %" for name in others] + ["Class"]
    rows = []
    for number in ordered:
        cells = [str(number)]
        cells += [_pct(report.percent_decrease(number, name, baseline)) for name in others]
        cells.append(DISPLAY_CLASS.get(report.classes.get(number, ""), ""))
        rows.append(cells)
    avg = ["Average"]
    for name in others:
        vals = [report.percent_decrease(n, name, baseline) for n in report.queries]
        vals = [v for v in vals if v is not None]
        avg.append(_pct(statistics.fmean(vals)) if vals else MISSING)
    avg.append("")
    tsv = "\n".join("\t".join(r) for r in [header] + rows + [avg]) + "\n"
    md = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    md += ["| " + " | ".join(r) + " |" for r in rows]
    md.append("| " + " | ".join(f"**{c}**" if c else "" for c in avg) + " |")
    return tsv, "\n".join(md) + "\n"


def timings_tsv(report: BenchReport) -> str:
    """Median wall time per query and layout in milliseconds, with run status."""
    lines = ["\t".join(["Query", "Class"] + [f"{n} ms" for n in report.layouts]
                       + [f"{n} status" for n in report.layouts])]
    for number in report.queries:
        cells = [str(number), report.classes.get(number, "")]
        for name in report.layouts:
            t = report.median(number, name)
            cells.append(MISSING if t is None else f"{t * 1000:.3f}")
        cells += [report.runs[(number, name)].status for name in report.layouts]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"

"""
Comparing layouts on the query catalog
======================================

Writes a synthetic dataset to disk, imports it once per layout, checks that
every layout returns the same answers and reports the percent change in
median running time against the Full layout.

Run with ``python walkthroughs/04_layout_benchmark.py``.
"""

import tempfile

from ctxgraph.bench import GenParams, generate, report_render, run_suite

with tempfile.TemporaryDirectory() as data:
    counts = generate(GenParams(scale=1e-5, seed=7), data).counts
    print("dataset:", counts)

    def progress(number, layout, record):
        print(f"  query {number:2} on {layout:5}: {record.median * 1e3:8.2f} ms")

    report = run_suite(data, ["poly1", "poly2"], [1, 2, 3, 11, 26], repetitions=3,
                       progress=progress)

for name, fp in report.footprints.items():
    print(f"{name:6} graph string bytes {fp.graph_string_bytes:>9,}  "
          f"dictionary bytes {fp.dict_bytes:>7,}")

# Positive percentages mean the layout was faster than Full.
tsv, markdown = report_render(report)
print(markdown)

"""
Contexts, metagraphs and enrichment
===================================

Documents and their annotations act as contexts. This script derives the
contexts of a few elements, links contexts into a metagraph and then
materialises shared contexts as new edges.

Run with ``python walkthroughs/03_contexts.py``.
"""

import json

from ctxgraph import (ContextModel, build_context_hypergraph, build_metagraph, con,
                      enrich_graph, evaluate)
from ctxgraph.bench import GenParams, generate
from ctxgraph.export import export_json_graph, metagraph_document

g = generate(GenParams(scale=1e-5, seed=3)).graph
model = ContextModel()

# A document's contexts are the nodes it reaches through context edge types.
doc = g.find_nodes("Document")[0]
print("contexts of the first document:", sorted(con(g, model, node=doc)))

# A hasRelation edge names its source document in an attribute.
rel = next(e for e in g.edges() if g.edge_type(e) == "hasRelation")
print("contexts of the first relation:", sorted(con(g, model, edge=rel)))

# The metagraph links two contexts whenever a graph edge joins elements
# bearing them. Scoping it to a few documents keeps it small.
scope = [row[0] for row in evaluate(g, "MATCH (d:Document) RETURN d LIMIT 20").rows]
meta = build_metagraph(g, model, scope)
print(f"{len(meta.contexts)} contexts, {len(meta)} meta-edges within the scope")
doc_json = metagraph_document(g, meta)
print("metagraph document keys:", sorted(doc_json["graph"]))

# Each shared context becomes a hyperedge over its bearers.
hyper = build_context_hypergraph(g, model, scope)
print(f"hypergraph: {len(hyper.vertices)} vertices, {len(hyper.hyperedges)} hyperedges")

# Enrichment writes a sharesContext edge between bearers of the same context.
_, added = enrich_graph(g, model, subgraph_nodes=scope)
print("sharesContext edges added:", added)

# Any query result exports as a JSON Graph document.
table = evaluate(g, "MATCH (a:Document)-[r:sharesContext]->(b:Document) RETURN a, r, b LIMIT 3")
print(json.dumps(json.loads(export_json_graph(g, table))["graph"]["metadata"], indent=1))

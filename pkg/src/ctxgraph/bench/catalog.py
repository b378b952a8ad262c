"""The 27 biomedical catalog queries, phrased in the ctxgraph query language."""

from __future__ import annotations

from dataclasses import dataclass

from ..graph import Graph
from ..query import ResultTable

CLASSES = ("CRPQ", "ECRPQ", "RPQ", "ShortestPath", "PageRank", "Betweenness", "Degree",
           "Louvain", "Components")

_ROTHE = 'Author{forename="Ulrich", surname="Rothe"}'
_CASTILLO = 'Author{forename="A", surname="Castillo"}'


@dataclass(frozen=True)
class QueryCatalogEntry:
    number: int
    title: str
    cls: str
    text: str
    arity: int
    non_empty: bool = True
    argmax_label: str | None = None   # label of the top-ranked node, for ranking queries

    def check(self, graph: Graph, table: ResultTable) -> list[str]:
        """Shape problems of a result (empty list when the result looks right)."""
        problems = []
        if len(table.columns) != self.arity:
            problems.append(f"expected {self.arity} columns, got {len(table.columns)}")
        if self.non_empty and not table.rows:
            problems.append("expected at least one row")
        if self.argmax_label and table.rows:
            top = table.rows[0][0]
            if self.argmax_label not in graph.labels(top):
                problems.append(f"top node {top} is not a {self.argmax_label}")
        return problems


def _e(label: str) -> str:
    return f'Entity{{preferredLabel="{label}"}}'


CATALOG: tuple[QueryCatalogEntry, ...] = (
    QueryCatalogEntry(
        1, "First author stating that APP enhances gamma Secretase Complex", "CRPQ",
        f"MATCH (n:{_e('APP')})-[r:hasRelation{{function=\"increases\"}}]->"
        f"(m:{_e('gamma Secretase Complex')}), "
        "(doc:Document{documentID=r.context})<-[:isAuthor]-(author:Author) "
        "RETURN doc, author ORDER BY doc.publicationDate ASC LIMIT 1", 2),
    QueryCatalogEntry(
        2, "Genes playing a role in two diseases", "RPQ",
        'MATCH (s1:Entity{source="MESH"})<-[:hasRelation]-(g:Entity{source="HGNC"})'
        '-[:hasRelation]->(s2:Entity{source="MESH"}) RETURN g, s1, s2', 3),
    QueryCatalogEntry(
        3, "Journal publishing that APP enhances gamma Secretase Complex", "CRPQ",
        f"MATCH (n:{_e('APP')})-[r:hasRelation{{function=\"increases\"}}]->"
        f"(m:{_e('gamma Secretase Complex')}), "
        "(doc:Document{documentID=r.context})-[:publishedIn]->(j:Journal) RETURN doc, j", 2),
    QueryCatalogEntry(
        4, "Shortest way between axonal transport and LRP3", "ShortestPath",
        f"CALL shortest_path(source='MATCH (e:{_e('axonal transport')}) RETURN e', "
        f"target='MATCH (e:{_e('LRP3')}) RETURN e', direction=\"undirected\")", 1),
    QueryCatalogEntry(
        5, "Publishing and citing documents of the APP statement", "CRPQ",
        f"MATCH (n:{_e('APP')})-[r:hasRelation{{function=\"increases\"}}]->"
        f"(m:{_e('gamma Secretase Complex')}), "
        "(doc:Document{documentID=r.context})<-[:hasCitation]-(citing:Document) "
        "RETURN doc, citing", 2),
    QueryCatalogEntry(
        6, "Most important entities around Alzheimer Disease", "PageRank",
        f"CALL pagerank(nodes=['MATCH (e:{_e('Alzheimer Disease')}) RETURN e', "
        f"'MATCH (e:{_e('Alzheimer Disease')})-[]-(n:Entity) RETURN n'], "
        "edges=\"hasRelation\", top=10)", 2, argmax_label="Entity"),
    QueryCatalogEntry(
        7, "Author couples publishing on Alzheimer Disease in the same journal", "CRPQ",
        f"MATCH (a1:Author)-[:isAuthor]->(d1:Document)-[:hasAnnotation]->"
        f"(e:{_e('Alzheimer Disease')}), "
        "(a2:Author)-[:isAuthor]->(d2:Document)-[:hasAnnotation]->(e), "
        "(d1)-[:publishedIn]->(j:Journal)<-[:publishedIn]-(d2) "
        "WHERE a1 <> a2 RETURN DISTINCT a1, a2, j", 3),
    QueryCatalogEntry(
        8, "Path of biological entities from Alzheimer Disease to ACHE", "ECRPQ",
        f"MATCH p=(a:{_e('Alzheimer Disease')})-[:hasRelation*1..8]-(b:{_e('ACHE')}) "
        "RETURN p", 1),
    QueryCatalogEntry(
        9, "Contradictory statements on apoptotic process and SLC25A21 within one affiliation",
        "CRPQ",
        f"MATCH (x:{_e('apoptotic process')})-[r1:hasRelation{{function=\"increases\"}}]->"
        f"(y:{_e('SLC25A21')}), (x)-[r2:hasRelation{{function=\"decreases\"}}]->(y), "
        "(d1:Document{documentID=r1.context})<-[:isAuthor]-(a1:Author)-[:hasAffiliation]->"
        "(f:Affiliation)<-[:hasAffiliation]-(a2:Author)-[:isAuthor]->"
        "(d2:Document{documentID=r2.context}) "
        "RETURN f, r1.function, r2.function, count(*) AS statements", 4),
    QueryCatalogEntry(
        10, "Genes mentioned in both Alzheimer and Down Syndrome documents", "CRPQ",
        f"MATCH (g:Entity{{source=\"HGNC\"}})<-[:hasAnnotation]-(d1:Document)"
        f"-[:hasAnnotation]->(s1:{_e('Alzheimer Disease')}), "
        f"(g)<-[:hasAnnotation]-(d2:Document)-[:hasAnnotation]->(s2:{_e('Down Syndrome')}) "
        "RETURN DISTINCT g", 1),
    QueryCatalogEntry(
        11, "Functions of IL1B across contexts", "RPQ",
        f"MATCH (g:{_e('IL1B')})-[r:hasRelation]-(o:Entity) "
        "RETURN o, r.function, r.context", 3),
    QueryCatalogEntry(
        12, "Distance between two documents", "ShortestPath",
        "CALL shortest_path(source='MATCH (d:Document{documentID=\"PMID:16160056\"}) RETURN d', "
        "target='MATCH (d:Document{documentID=\"PMID:16160050\"}) RETURN d', "
        "types=\"hasCitation\", direction=\"undirected\")", 1),
    QueryCatalogEntry(
        13, "APOE processes in the context of the brain and their authors", "CRPQ",
        f"MATCH (g:{_e('APOE')})-[r:hasRelation]-(o:Entity), "
        f"(d:Document{{documentID=r.context}})-[:hasAnnotation]->(b:{_e('brain')}), "
        "(a:Author)-[:isAuthor]->(d) RETURN o, r.function, d, a", 4),
    QueryCatalogEntry(
        14, "Statements without a source", "RPQ",
        "MATCH (x:Entity)-[r:hasRelation]->(y:Entity) WHERE r.context IS NULL "
        "RETURN x, r, y", 3),
    QueryCatalogEntry(
        15, "Sources behind contradictory statements", "CRPQ",
        'MATCH (x:Entity)-[r1:hasRelation{function="increases"}]->(y:Entity), '
        '(x)-[r2:hasRelation{function="decreases"}]->(y) '
        "RETURN x, y, count(*) AS pairs ORDER BY pairs DESC", 3),
    QueryCatalogEntry(
        16, "Citations between documents on APP and on Alzheimer Disease", "RPQ",
        f"MATCH (x:{_e('APP')})-[:hasRelation]->(y:{_e('Alzheimer Disease')}), "
        "(d1:Document)-[:hasAnnotation]->(x), (d2:Document)-[:hasAnnotation]->(y), "
        "(d1)-[:hasCitation]->(d2) RETURN DISTINCT d1, d2", 2),
    QueryCatalogEntry(
        17, "Oldest document describing APP", "RPQ",
        f"MATCH (d:Document)-[:hasAnnotation]->(e:{_e('APP')}) "
        "RETURN d, d.publicationDate ORDER BY d.publicationDate ASC LIMIT 1", 2),
    QueryCatalogEntry(
        18, "Joint work or shared affiliation between Rothe and Castillo", "ECRPQ",
        f"MATCH p=(a:{_ROTHE})-[:/(isAuthor|hasAffiliation)*/ *1..4]-(b:{_CASTILLO}) "
        "RETURN p", 1),
    QueryCatalogEntry(
        19, "Topics Rothe writes about most", "RPQ",
        f"MATCH (a:{_ROTHE})-[:isAuthor]->(d:Document)-[:hasAnnotation]->(e:Entity) "
        "RETURN e, count(*) AS n ORDER BY n DESC LIMIT 10", 2),
    QueryCatalogEntry(
        20, "Connections between author Rothe and reviewer Castillo", "CRPQ",
        f"MATCH p=(author:{_ROTHE})-[:isAuthor]-(doc:Document)-[:isAuthor]-"
        f"(reviewer:{_CASTILLO}), "
        "p2=(author)-[]-(doc1:Document)-[:hasCitation]-(doc2)-[:isAuthor]-(reviewer), "
        "p3=(author)-[]-(a:Affiliation)-[]-(reviewer) RETURN p, p2, p3 LIMIT 10", 3),
    QueryCatalogEntry(
        21, "Affiliation with most D008358 publications in Biotechnology letters", "RPQ",
        "MATCH (f:Affiliation)<-[:hasAffiliation]-(a:Author)-[:isAuthor]->(d:Document)"
        "-[:hasAnnotation]->(e:Entity{identifier=\"D008358\"}), "
        "(d)-[:publishedIn]->(j:Journal{name=\"Biotechnology letters\"}) "
        "RETURN f, count(*) AS n ORDER BY n DESC LIMIT 1", 2),
    QueryCatalogEntry(
        22, "Dates of documents cited by D017629 documents", "ECRPQ",
        "MATCH (e:Entity{identifier=\"D017629\"})<-[:hasAnnotation]-(d:Document), "
        "p=(d)-[:hasCitation*1..2]->(c:Document) RETURN d, c, c.publicationDate, p", 4),
    QueryCatalogEntry(
        23, "Most cited D017629 document", "PageRank",
        "CALL pagerank(nodes='MATCH (d:Document)-[:hasAnnotation]->"
        "(e:Entity{identifier=\"D017629\"}) RETURN d', edges=\"hasCitation\", top=1)", 2,
        argmax_label="Document"),
    QueryCatalogEntry(
        24, "Community of entities around APP", "Louvain",
        f"CALL louvain(nodes=['MATCH (e:{_e('APP')}) RETURN e', "
        f"'MATCH (e:{_e('APP')})-[:hasRelation*1..2]-(n:Entity) RETURN n'], "
        "edges=\"hasRelation\", seed=0)", 2),
    QueryCatalogEntry(
        25, "Author connecting Alzheimer Disease and Parkinson Disease", "Betweenness",
        f"CALL betweenness(nodes=["
        f"'MATCH (d:Document)-[:hasAnnotation]->(e:{_e('Alzheimer Disease')}) RETURN d', "
        f"'MATCH (d:Document)-[:hasAnnotation]->(e:{_e('Parkinson Disease')}) RETURN d', "
        f"'MATCH (a:Author)-[:isAuthor]->(d:Document)-[:hasAnnotation]->"
        f"(e:{_e('Alzheimer Disease')}) RETURN a', "
        f"'MATCH (a:Author)-[:isAuthor]->(d:Document)-[:hasAnnotation]->"
        f"(e:{_e('Parkinson Disease')}) RETURN a'], "
        "edges=\"isAuthor\", return_label=\"Author\", top=1)", 2, argmax_label="Author"),
    QueryCatalogEntry(
        26, "Most important gene by degree", "Degree",
        "CALL degree(nodes='MATCH (e:Entity{source=\"HGNC\"}) RETURN e', "
        "edges='MATCH (e1:Entity)<-[:hasAnnotation]-(d1:Document) RETURN e1, d1', top=1)", 2,
        argmax_label="Entity"),
    QueryCatalogEntry(
        27, "Connected components between entities", "Components",
        "CALL components(nodes='MATCH (e:Entity) RETURN e', edges=\"hasRelation\")", 2),
)

# query 2 narrowed to the two diseases, used for fixture checks
QUERY_2_RESTRICTED = (
    'MATCH (s1:Entity{source="MESH", preferredLabel="Alzheimer Disease"})<-[:hasRelation]-'
    '(g:Entity{source="HGNC"})-[:hasRelation]->'
    '(s2:Entity{source="MESH", preferredLabel="Down Syndrome"}) RETURN g, s1, s2 LIMIT 25')

BY_NUMBER = {e.number: e for e in CATALOG}


def entry(number: int) -> QueryCatalogEntry:
    return BY_NUMBER[number]


def parse_selection(text: str | None) -> list[int]:
    """``"1-5,8,20-27"`` -> sorted query numbers; ``None`` or ``"all"`` -> all 27."""
    if text is None or text.strip().lower() == "all":
        return sorted(BY_NUMBER)
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            out.update(range(lo, hi + 1))
        else:
            out.add(int(part))
    unknown = out - set(BY_NUMBER)
    if unknown:
        raise ValueError(f"no catalog queries numbered {sorted(unknown)}")
    return sorted(out)

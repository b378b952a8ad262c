"""Schema-faithful synthetic document/context graphs.

Node and edge counts follow the biomedical literature graph's proportions
(documents : authors : affiliations : entities = 30 : 17 : 21 : 5, with 554
of every 850 edges being annotations), scaled by ``GenParams.scale``.
Annotation and authorship counts are Zipf-skewed. A small set of named
entities, documents and authors is planted so every catalog query has a
non-empty, checkable answer.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ScaleTooSmall
from ..graph import DEFAULT_INDEXED_KEYS, Graph

FUNCTIONS = ("increases", "decreases", "inhibits", "improves")
PUBLICATION_TYPES = ("Journal Article", "Review", "Clinical Trial", "Case Reports",
                     "Meta-Analysis", "Letter", "Comparative Study")
PLANTED_JOURNAL = "Biotechnology letters"
MIN_DOCUMENTS = 100

# (preferredLabel, source, identifier)
PLANTED_ENTITIES = (
    ("APP", "HGNC", "HGNC:APP"),
    ("gamma Secretase Complex", "GO", "GO:gamma-secretase"),
    ("Alzheimer Disease", "MESH", "MESH:alzheimer"),
    ("Down Syndrome", "MESH", "MESH:down"),
    ("TNF", "HGNC", "HGNC:TNF"),
    ("Diabetes Mellitus", "MESH", "MESH:diabetes"),
    ("Parkinson Disease", "MESH", "MESH:parkinson"),
    ("ACHE", "HGNC", "HGNC:ACHE"),
    ("axonal transport", "GO", "GO:axonal-transport"),
    ("LRP3", "HGNC", "HGNC:LRP3"),
    ("IL1B", "HGNC", "HGNC:IL1B"),
    ("apoptotic process", "GO", "GO:apoptosis"),
    ("SLC25A21", "HGNC", "HGNC:SLC25A21"),
    ("APOE", "HGNC", "HGNC:APOE"),
    ("brain", "MESH", "MESH:brain"),
    ("Topic D008358", "MESH", "D008358"),
    ("Topic D017629", "MESH", "D017629"),
)
# entities the random relation generator must leave alone so the planted
# answers stay exact
QUIET_ENTITIES = ("Down Syndrome", "gamma Secretase Complex", "apoptotic process",
                  "SLC25A21", "ACHE", "axonal transport", "LRP3")

EARLIEST_AUTHOR = ("Mira", "Halden")
ROTHE = ("Ulrich", "Rothe")
CASTILLO = ("A", "Castillo")

_FORENAMES = ("Anna", "Ben", "Carla", "David", "Elif", "Farid", "Greta", "Hiro", "Ines",
              "Jonas", "Kira", "Luis", "Mona", "Nils", "Olga", "Pavel", "Rita", "Sven",
              "Tara", "Umar", "Vera", "Wen", "Yara", "Zoltan")


@dataclass(frozen=True)
class GenParams:
    scale: float = 1e-4
    seed: int = 0
    documents: float = 30e6
    authors: float = 17e6
    affiliations: float = 21e6
    entities: float = 5e6
    annotation_edges: float = 554e6
    total_edges: float = 850e6
    zipf_s: float = 1.1
    pmc_fraction: float = 0.12
    max_authors: int = 15

    def counts(self) -> dict[str, int]:
        if self.scale <= 0:
            raise ScaleTooSmall("scale must be positive")
        s = self.scale
        out = {
            "documents": round(self.documents * s),
            "authors": round(self.authors * s),
            "affiliations": round(self.affiliations * s),
            "entities": round(self.entities * s),
            "annotation_edges": round(self.annotation_edges * s),
            "total_edges": round(self.total_edges * s),
        }
        if out["documents"] < MIN_DOCUMENTS:
            raise ScaleTooSmall(f"scale {s} yields {out['documents']} documents "
                                f"(need at least {MIN_DOCUMENTS})")
        if out["entities"] < 2 * len(PLANTED_ENTITIES):
            raise ScaleTooSmall(f"scale {s} yields too few entities for the planted fixture")
        # a document annotates at most half of the entities
        if out["annotation_edges"] > (out["entities"] // 2) * out["documents"]:
            raise ScaleTooSmall(f"scale {s} yields too few entities for "
                                f"{out['annotation_edges']} annotation edges")
        return out


@dataclass
class GeneratedGraph:
    graph: Graph
    params: GenParams
    counts: dict[str, int]
    planted: dict[str, object] = field(default_factory=dict)

    def write_csvs(self, directory) -> tuple[Path, Path]:
        from ..export import write_graph_csvs

        return write_graph_csvs(self.graph, directory)


def _zipf_weights(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1, dtype=float) ** s
    return w / w.sum()


class _Builder:
    def __init__(self, params: GenParams):
        self.p = params
        self.c = params.counts()
        self.rng = np.random.default_rng(params.seed)
        self.g = Graph()
        for label in ("Document", "Author", "Entity", "Annotation", "Journal", "Affiliation",
                      "PublicationType", "Source"):
            for key in DEFAULT_INDEXED_KEYS:
                self.g.register_index(label, key)
        self.planted: dict[str, object] = {}
        self.structural = 0

    # -- helpers ---------------------------------------------------------------------

    def node(self, labels, attrs, ext):
        return self.g.add_node(labels, attrs, ext)

    def edge(self, s, d, t, attrs=None):
        return self.g.add_edge(s, d, t, attrs)

    def date(self, lo=1990, hi=2020):
        start = _dt.date(lo, 1, 1).toordinal()
        end = _dt.date(hi, 12, 31).toordinal()
        return _dt.date.fromordinal(int(self.rng.integers(start, end + 1)))

    def pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    # -- nodes -------------------------------------------------------------------------

    def build_nodes(self):
        c, rng = self.c, self.rng
        self.sources = {name: self.node({"Source"}, {"name": name}, f"src:{name}")
                        for name in ("PubMed", "PMC")}
        self.pubtypes = [self.node({"PublicationType"}, {"name": t}, f"pt:{i}")
                         for i, t in enumerate(PUBLICATION_TYPES)]
        n_journals = max(5, c["documents"] // 100)
        names = [PLANTED_JOURNAL] + [f"Journal of Research {i}" for i in range(1, n_journals)]
        self.journals = [self.node({"Journal"}, {"name": nm}, f"jr:{i}")
                         for i, nm in enumerate(names)]

        self.entities = []
        self.entity_by_name = {}
        n_random = c["entities"] - len(PLANTED_ENTITIES)
        rand_sources = rng.choice(["HGNC", "MESH", "GO"], size=n_random, p=[0.4, 0.4, 0.2])
        specs = list(PLANTED_ENTITIES)
        for i, src in enumerate(rand_sources):
            src = str(src)
            name = {"HGNC": f"GENE{i}", "MESH": f"Disease term {i}", "GO": f"process {i}"}[src]
            ident = {"HGNC": f"HGNC:{i}", "MESH": f"D9{i:05d}", "GO": f"GO:{i:07d}"}[src]
            specs.append((name, src, ident))
        for i, (name, src, ident) in enumerate(specs):
            attrs = {"identifier": ident, "preferredLabel": name, "source": src}
            labels = {"Entity"}
            if src == "MESH":
                labels.add("Annotation")
                attrs["label"] = name
            nid = self.node(labels, attrs, f"ent:{i}")
            self.entities.append(nid)
            self.entity_by_name[name] = nid

        self.affiliations = [self.node({"Affiliation"}, {"name": f"Institute {i}"}, f"aff:{i}")
                             for i in range(c["affiliations"])]

        self.authors = []
        planted_authors = [EARLIEST_AUTHOR, ROTHE, CASTILLO]
        for i in range(c["authors"]):
            if i < len(planted_authors):
                fore, sur = planted_authors[i]
            else:
                fore, sur = self.pick(_FORENAMES), f"Surname{i}"
            self.authors.append(self.node({"Author"}, {"forename": fore, "surname": sur},
                                          f"au:{i}"))
        self.earliest_author, self.rothe, self.castillo = self.authors[:3]

        self.docs = []
        self.doc_id = {}
        self.pmc = []
        pmc_flags = rng.random(c["documents"]) < self.p.pmc_fraction
        for i in range(c["documents"]):
            source = "PMC" if pmc_flags[i] else "PubMed"
            pmid = f"PMID:{20000000 + i}"
            attrs = {"documentID": pmid, "title": f"Study {i}", "source": source,
                     "publicationDate": self.date()}
            nid = self.node({"Document"}, attrs, f"doc:{pmid}")
            self.docs.append(nid)
            self.doc_id[nid] = pmid
            if source == "PMC":
                self.pmc.append(nid)

    def set_doc(self, d, **attrs):
        for k, v in attrs.items():
            self.g.set_node_attribute(d, k, v)
        if "documentID" in attrs:
            self.doc_id[d] = attrs["documentID"]
        if attrs.get("source") == "PMC" and d not in self.pmc:
            self.pmc.append(d)

    # -- structure plan ---------------------------------------------------------------

    def plan_structure(self):
        """Journal, publication types, authors and affiliations, before any edge exists."""
        rng, p = self.rng, self.p
        n_random = len(self.authors) - 3   # the three named authors are planted only
        author_w = _zipf_weights(n_random, p.zipf_s)
        perm = rng.permutation(n_random) + 3
        team = _zipf_weights(p.max_authors, p.zipf_s)
        self.doc_journal, self.doc_types, self.doc_authors = {}, {}, {}
        for d in self.docs:
            self.doc_journal[d] = self.pick(self.journals)
            k = 1 + int(rng.random() < 0.3)
            self.doc_types[d] = sorted(int(t) for t in
                                       rng.choice(len(self.pubtypes), size=k, replace=False))
            size = min(1 + int(rng.choice(p.max_authors, p=team)), n_random)
            picks = rng.choice(n_random, size=size, replace=False, p=author_w)
            self.doc_authors[d] = sorted(self.authors[int(perm[i])] for i in picks)
        self.author_affs = {}
        for a in self.authors:
            k = 1 + int(rng.random() < 0.2)
            picks = rng.choice(len(self.affiliations), size=k, replace=False)
            self.author_affs[a] = sorted(self.affiliations[int(x)] for x in picks)

    # -- planted fixture -----------------------------------------------------------------

    def plant(self):
        """Rewire the first 40 documents into the named fixture."""
        e = self.entity_by_name
        planted = self.planted
        self.planted_docs = set(self.docs[:40])
        docs = iter(self.docs[:40])
        self.planted_annotations: list[tuple[int, int]] = []
        self.planted_relations: list[tuple[int, int, dict]] = []
        self.planted_citations: list[tuple[int, int]] = []

        def annotate(d, *names):
            for name in names:
                self.planted_annotations.append((d, e[name]))

        def relation(a, b, function, d=None):
            attrs = {"function": function}
            if d is not None:
                attrs["context"] = self.doc_id[d]
            self.planted_relations.append((e[a], e[b], attrs))

        def cite(a, b):
            self.planted_citations.append((a, b))

        def affiliate(a, f):
            if f not in self.author_affs[a]:
                self.author_affs[a] = sorted(self.author_affs[a] + [f])

        # three statements that APP increases gamma secretase, at distinct dates
        q1_docs = []
        for date in (_dt.date(1987, 3, 14), _dt.date(1996, 6, 2), _dt.date(2004, 11, 23)):
            d = next(docs)
            self.set_doc(d, publicationDate=date)
            annotate(d, "APP", "gamma Secretase Complex")
            relation("APP", "gamma Secretase Complex", "increases", d)
            q1_docs.append(d)
        self.doc_authors[q1_docs[0]] = [self.earliest_author]
        planted["q1_documents"] = q1_docs
        planted["earliest_document"] = q1_docs[0]
        planted["earliest_author"] = self.earliest_author

        citing = next(docs)
        self.set_doc(citing, source="PMC")
        cite(citing, q1_docs[1])
        planted["q1_citing"] = citing

        # genes in diseases: APP is the only gene tied to both Alzheimer and Down
        d_ad, d_ds, d_tnf = next(docs), next(docs), next(docs)
        relation("APP", "Alzheimer Disease", "increases", d_ad)
        relation("APP", "Down Syndrome", "increases", d_ds)
        relation("TNF", "Diabetes Mellitus", "increases", d_tnf)
        relation("TNF", "Alzheimer Disease", "increases", d_tnf)
        annotate(d_ad, "APP", "Alzheimer Disease")
        annotate(d_ds, "APP", "Down Syndrome")
        annotate(d_tnf, "TNF", "Diabetes Mellitus", "Alzheimer Disease")

        annotate(next(docs), "axonal transport", "LRP3")

        # APOE bridges Alzheimer and ACHE in a document about the brain
        d_apoe = next(docs)
        relation("APOE", "ACHE", "increases", d_apoe)
        relation("APOE", "Alzheimer Disease", "decreases", d_apoe)
        annotate(d_apoe, "APOE", "brain")
        planted["apoe_document"] = d_apoe

        # contradictory statements by two authors of one affiliation
        d_inc, d_dec = next(docs), next(docs)
        relation("apoptotic process", "SLC25A21", "increases", d_inc)
        relation("apoptotic process", "SLC25A21", "decreases", d_dec)
        shared = self.affiliations[0]
        for d in (d_inc, d_dec):
            affiliate(self.doc_authors[d][0], shared)
        planted["contradiction_affiliation"] = shared

        relation("IL1B", "TNF", "increases", next(docs))
        relation("IL1B", "Parkinson Disease", "improves", next(docs))

        # a two-step citation chain between the two named documents
        d56, mid, d50 = next(docs), next(docs), next(docs)
        self.set_doc(d56, documentID="PMID:16160056", source="PMC")
        self.set_doc(d50, documentID="PMID:16160050")
        self.set_doc(mid, source="PMC")
        cite(d56, mid)
        cite(mid, d50)
        planted["pmid_chain"] = (d56, mid, d50)

        # statements without a source document
        relation("TNF", "Parkinson Disease", "increases")
        relation("IL1B", "Alzheimer Disease", "decreases")

        # an APP document citing an Alzheimer document
        d_app, d_alz = next(docs), next(docs)
        self.set_doc(d_app, source="PMC")
        annotate(d_app, "APP")
        annotate(d_alz, "Alzheimer Disease")
        cite(d_app, d_alz)

        # Rothe and Castillo: a joint document, a citation, a shared affiliation
        joint, d_r, d_c = next(docs), next(docs), next(docs)
        self.doc_authors[joint] = [self.rothe, self.castillo]
        self.doc_authors[d_r] = [self.rothe]
        self.doc_authors[d_c] = [self.castillo]
        self.set_doc(d_r, source="PMC")
        cite(d_r, d_c)
        for a in (self.rothe, self.castillo):
            affiliate(a, self.affiliations[1])
        annotate(joint, "Alzheimer Disease", "APP")
        annotate(d_r, "Alzheimer Disease", "TNF")
        annotate(d_c, "brain")
        planted["rothe_documents"] = (joint, d_r)

        for _ in range(3):
            d = next(docs)
            self.doc_journal[d] = self.journals[0]
            annotate(d, "Topic D008358")
        hub = next(docs)
        annotate(hub, "Topic D017629")
        for _ in range(3):
            d = next(docs)
            self.set_doc(d, source="PMC")
            annotate(d, "Topic D017629")
            cite(d, hub)
        planted["d017629_hub"] = hub

        # one author writes on both Alzheimer and Parkinson
        d_pd = next(docs)
        annotate(d_pd, "Parkinson Disease")
        bridge = self.doc_authors[d_ad][0]
        if bridge not in self.doc_authors[d_pd]:
            self.doc_authors[d_pd] = sorted(self.doc_authors[d_pd] + [bridge])
        planted["bridge_author"] = bridge

    # -- edges -------------------------------------------------------------------------

    def emit(self):
        rng, c, g = self.rng, self.c, self.g
        for d in self.docs:
            self.edge(self.sources[g.node_attrs(d)["source"]], d, "hasDocument")
        for d in self.docs:
            self.edge(d, self.doc_journal[d], "publishedIn")
        for d in self.docs:
            for t in self.doc_types[d]:
                self.edge(d, self.pubtypes[t], "hasPublicationType")
        for d in self.docs:
            for a in self.doc_authors[d]:
                self.edge(a, d, "isAuthor")
        for a in self.authors:
            for f in self.author_affs[a]:
                self.edge(a, f, "hasAffiliation")
        structural = g.edge_count

        # entity popularity: planted entities sit at mid ranks
        n_ent, n_pl = len(self.entities), len(PLANTED_ENTITIES)
        rank = np.empty(n_ent)
        rank[:n_pl] = 100 + np.arange(n_pl)
        rest = np.arange(n_ent - n_pl)
        rank[n_pl:] = rest + (rest >= 100) * n_pl
        weights = 1.0 / (rank + 1.0) ** self.p.zipf_s
        weights /= weights.sum()

        free_docs = [d for d in self.docs if d not in self.planted_docs]
        remaining = c["annotation_edges"] - len(self.planted_annotations)
        cap = n_ent // 2
        per_doc = rng.multinomial(remaining, np.full(len(free_docs), 1 / len(free_docs)))
        per_doc = np.minimum(per_doc, cap)
        short = remaining - int(per_doc.sum())
        if remaining > cap * len(free_docs):
            raise ScaleTooSmall(f"{remaining} annotations do not fit {len(free_docs)} documents "
                                f"with at most {cap} each")
        i = 0
        while short > 0:
            if per_doc[i % len(free_docs)] < cap:
                per_doc[i % len(free_docs)] += 1
                short -= 1
            i += 1
        for d, x in self.planted_annotations:
            self.edge(d, x, "hasAnnotation")
        for d, k in zip(free_docs, per_doc):
            picks = rng.choice(n_ent, size=int(k), replace=False, p=weights)
            for x in sorted(int(v) for v in picks):
                self.edge(d, self.entities[x], "hasAnnotation")
        self.n_annotations = c["annotation_edges"]

        planted_other = len(self.planted_relations) + len(self.planted_citations)
        budget = max(c["total_edges"] - c["annotation_edges"] - structural - planted_other, 0)
        n_rel = int(round(budget * 0.40))
        n_cit = int(round(budget * 0.35))
        n_co = int(round(budget * 0.20))
        n_child = budget - n_rel - n_cit - n_co

        quiet = {self.entity_by_name[name] for name in QUIET_ENTITIES}
        index = {nid: i for i, nid in enumerate(self.entities)}
        rel_ok = [x for x in self.entities if x not in quiet]
        rel_w = weights[[index[x] for x in rel_ok]]
        rel_w /= rel_w.sum()
        for a, b, attrs in self.planted_relations:
            self.edge(a, b, "hasRelation", attrs)
        for _ in range(n_rel):
            a, b = rng.choice(len(rel_ok), size=2, replace=False, p=rel_w)
            ctx = self.pick(free_docs)
            self.edge(rel_ok[int(a)], rel_ok[int(b)], "hasRelation",
                      {"function": str(self.pick(FUNCTIONS)), "context": self.doc_id[ctx]})

        for a, b in self.planted_citations:
            self.edge(a, b, "hasCitation")
        free_pmc = [d for d in self.pmc if d not in self.planted_docs]
        cited_w = _zipf_weights(len(free_docs), self.p.zipf_s)
        cited_order = rng.permutation(len(free_docs))
        for _ in range(n_cit):
            src = self.pick(free_pmc)
            dst = free_docs[int(cited_order[int(rng.choice(len(free_docs), p=cited_w))])]
            if dst == src:
                continue
            self.edge(src, dst, "hasCitation")

        multi = [d for d in free_docs if len(self.doc_authors[d]) >= 2]
        for _ in range(n_co):
            authors = self.doc_authors[self.pick(multi)]
            a, b = sorted(int(x) for x in rng.choice(len(authors), size=2, replace=False))
            self.edge(authors[a], authors[b], "isCoAuthor")

        by_source: dict[str, list[int]] = {}
        for x in rel_ok:
            by_source.setdefault(g.node_attrs(x)["source"], []).append(x)
        groups = [by_source[k] for k in sorted(by_source) if len(by_source[k]) >= 2]
        for _ in range(n_child):
            group = groups[int(rng.integers(len(groups)))]
            a, b = rng.choice(len(group), size=2, replace=False)
            self.edge(group[int(a)], group[int(b)], "childOf")
        self.planted["entities"] = dict(self.entity_by_name)
        self.planted["rothe"] = self.rothe
        self.planted["castillo"] = self.castillo


def generate(params: GenParams | None = None, out_dir=None) -> GeneratedGraph:
    """Build a synthetic graph; write ``nodes.csv``/``edges.csv`` when ``out_dir`` is set."""
    params = params or GenParams()
    b = _Builder(params)
    b.build_nodes()
    b.plan_structure()
    b.plant()
    b.emit()
    gen = GeneratedGraph(b.g, params, b.c, b.planted)
    if out_dir is not None:
        gen.write_csvs(out_dir)
    return gen

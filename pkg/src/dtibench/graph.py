"""Bipartite drug-target graph model, ingestion and network statistics."""

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)

Edge = tuple[str, str]  # (drug_id, protein_id)


class NodeKind(Enum):
    DRUG = "drug"
    PROTEIN = "protein"


@dataclass(frozen=True)
class NodeRef:
    kind: NodeKind
    id: str

    def __post_init__(self):
        if not self.id or any(c.isspace() for c in self.id):
            raise ValidationError(f"invalid node id {self.id!r}: empty or contains whitespace")


@dataclass(frozen=True)
class DTIGraph:
    """Immutable bipartite graph of drugs, proteins and positive interactions.

    ``drugs`` and ``proteins`` keep first-seen order; ``edges`` is a frozenset
    of (drug_id, protein_id) pairs.  Isolated nodes are permitted.
    """

    drugs: tuple[str, ...]
    proteins: tuple[str, ...]
    edges: frozenset[Edge]
    name: str = ""

    def __post_init__(self):
        drug_set, protein_set = set(self.drugs), set(self.proteins)
        if len(drug_set) != len(self.drugs):
            raise ValidationError("duplicate drug ids in node set")
        if len(protein_set) != len(self.proteins):
            raise ValidationError("duplicate protein ids in node set")
        for node in list(self.drugs) + list(self.proteins):
            NodeRef(NodeKind.DRUG, node)  # id well-formedness only
        for d, p in self.edges:
            if d not in drug_set:
                raise ValidationError(f"edge endpoint {d!r} is not a known drug")
            if p not in protein_set:
                raise ValidationError(f"edge endpoint {p!r} is not a known protein")

    @property
    def n_drugs(self) -> int:
        return len(self.drugs)

    @property
    def n_proteins(self) -> int:
        return len(self.proteins)

    @property
    def n_nodes(self) -> int:
        return len(self.drugs) + len(self.proteins)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def drug_degrees(self) -> Counter:
        c = Counter(d for d, _ in self.edges)
        for d in self.drugs:
            c.setdefault(d, 0)
        return c

    def protein_degrees(self) -> Counter:
        c = Counter(p for _, p in self.edges)
        for p in self.proteins:
            c.setdefault(p, 0)
        return c

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


@dataclass(frozen=True)
class GraphStats:
    n_drugs: int
    n_proteins: int
    n_nodes: int
    n_edges: int
    density_pct: float  # full precision; round only when reporting
    n_components: int

    # Table-style labels used by the one-row stats CSV.
    CSV_FIELDS = (
        ("Number of drugs", "n_drugs"),
        ("Number of proteins", "n_proteins"),
        ("Total number of nodes", "n_nodes"),
        ("Total number of edges", "n_edges"),
        ("Density (%)", "density_pct"),
        ("# of connected components", "n_components"),
    )

    def as_row(self) -> dict:
        row = {}
        for label, attr in self.CSV_FIELDS:
            value = getattr(self, attr)
            if attr == "density_pct":
                value = f"{value:.2f}"
            row[label] = value
        return row


@dataclass(frozen=True)
class AffinityRecord:
    drug_id: str
    protein_id: str
    kd: float

    def __post_init__(self):
        if self.kd < 0:
            raise ValidationError(
                f"negative kd {self.kd} for pair ({self.drug_id}, {self.protein_id})"
            )


@dataclass
class LoadReport:
    path: str
    n_rows: int = 0
    n_duplicates: int = 0


def load_edge_list(path, *, swap=False, name=None) -> tuple[DTIGraph, LoadReport]:
    """Read a tab-separated edge list into a graph.

    Rows are ``drug_id<TAB>protein_id`` (``swap=True`` for the reversed
    column order); lines starting with ``#`` are headers/comments.  Duplicate
    rows collapse to one edge and are counted in the returned report.
    """
    path = Path(path)
    report = LoadReport(path=str(path))
    drugs: dict[str, None] = {}
    proteins: dict[str, None] = {}
    edges: set[Edge] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2 or not cols[0].strip() or not cols[1].strip():
                raise ParseError("expected at least 2 tab-separated columns", path, lineno)
            a, b = cols[0].strip(), cols[1].strip()
            drug, protein = (b, a) if swap else (a, b)
            report.n_rows += 1
            if (drug, protein) in edges:
                report.n_duplicates += 1
                continue
            drugs.setdefault(drug, None)
            proteins.setdefault(protein, None)
            edges.add((drug, protein))
    if report.n_rows == 0:
        raise ParseError("file contains no edges", path)
    if report.n_duplicates:
        log.warning("%s: collapsed %d duplicate rows", path, report.n_duplicates)
    graph = DTIGraph(
        drugs=tuple(drugs),
        proteins=tuple(proteins),
        edges=frozenset(edges),
        name=name if name is not None else path.stem,
    )
    return graph, report


def save_edge_list(graph: DTIGraph, path) -> None:
    """Write the graph back as a sorted ``drug<TAB>protein`` edge list."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#drug_id\tprotein_id\n")
        for d, p in graph.sorted_edges():
            fh.write(f"{d}\t{p}\n")


def load_affinity_table(path) -> list[AffinityRecord]:
    """Read ``drug<TAB>protein<TAB>kd`` rows."""
    path = Path(path)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 3:
                raise ParseError("expected 3 tab-separated columns", path, lineno)
            try:
                kd = float(cols[2])
            except ValueError:
                raise ParseError(f"bad kd value {cols[2]!r}", path, lineno) from None
            try:
                records.append(AffinityRecord(cols[0].strip(), cols[1].strip(), kd))
            except ValidationError as exc:
                raise ParseError(str(exc), path, lineno) from None
    if not records:
        raise ParseError("file contains no affinity records", path)
    return records


def binarize_affinities(records, threshold: float = 30.0, name: str = "") -> DTIGraph:
    """Build a positive-interaction graph from affinity measurements.

    A pair becomes an edge iff its Kd is strictly below ``threshold``.
    Repeated measurements of the same pair keep the minimum Kd (the most
    potent measurement governs).  Every drug/protein seen in the records is
    kept as a node even when it ends up with no positive edge.
    """
    if threshold <= 0:
        raise ValidationError(f"threshold must be positive, got {threshold}")
    drugs: dict[str, None] = {}
    proteins: dict[str, None] = {}
    best_kd: dict[Edge, float] = {}
    for rec in records:
        if rec.kd < 0:
            raise ValidationError(f"negative kd {rec.kd} for ({rec.drug_id}, {rec.protein_id})")
        drugs.setdefault(rec.drug_id, None)
        proteins.setdefault(rec.protein_id, None)
        pair = (rec.drug_id, rec.protein_id)
        if pair not in best_kd or rec.kd < best_kd[pair]:
            best_kd[pair] = rec.kd
    edges = frozenset(pair for pair, kd in best_kd.items() if kd < threshold)
    return DTIGraph(tuple(drugs), tuple(proteins), edges, name=name)


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def count_components(graph: DTIGraph, *, include_isolated=True) -> int:
    """Connected components of the undirected graph via disjoint-set union.

    Isolated nodes count as singleton components unless excluded.
    """
    index = {("d", d): i for i, d in enumerate(graph.drugs)}
    offset = len(graph.drugs)
    index.update({("p", p): offset + i for i, p in enumerate(graph.proteins)})
    dsu = _DisjointSet(len(index))
    for d, p in graph.edges:
        dsu.union(index[("d", d)], index[("p", p)])
    if include_isolated:
        return len({dsu.find(i) for i in range(len(index))})
    return len({dsu.find(index[("d", d)]) for d, _ in graph.edges})


def compute_stats(graph: DTIGraph, *, include_isolated_components=True) -> GraphStats:
    """Network statistics with density over all node pairs, n(n-1)/2."""
    n = graph.n_nodes
    possible = n * (n - 1) / 2
    density = 100.0 * graph.n_edges / possible if possible else 0.0
    return GraphStats(
        n_drugs=graph.n_drugs,
        n_proteins=graph.n_proteins,
        n_nodes=n,
        n_edges=graph.n_edges,
        density_pct=density,
        n_components=count_components(graph, include_isolated=include_isolated_components),
    )


def degree_histogram(graph: DTIGraph, side: NodeKind) -> dict[int, int]:
    """Histogram {degree: node count} for one side of the graph."""
    degrees = graph.drug_degrees() if side is NodeKind.DRUG else graph.protein_degrees()
    hist: dict[int, int] = {}
    for _, deg in degrees.items():
        hist[deg] = hist.get(deg, 0) + 1
    return dict(sorted(hist.items()))


def write_stats_csv(stats: GraphStats, path, dataset: str = "") -> None:
    """One-row CSV with the table-style column labels."""
    row = {"dataset": dataset, **stats.as_row()}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(row))
        writer.writeheader()
        writer.writerow(row)

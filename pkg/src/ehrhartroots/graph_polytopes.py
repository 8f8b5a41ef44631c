from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .config import Limits, Tolerances
from .ehrhart_engine import (
    DeltaVector,
    check_root_symmetry,
    delta_from_ehrhart,
    ehrhart_by_interpolation,
    is_gorenstein,
    validate_delta,
)
from .exact_arith import RationalPolynomial, format_polynomial
from .polytope_geometry import GeometryLimits, VPolytope, affine_rank
from .root_analysis import (
    Certificate,
    RootReport,
    classify_roots,
    find_roots_numeric,
    verify_critical_line_exact,
)

logger = logging.getLogger(__name__)

MAX_ENUMERATION_VERTICES = 8


class GraphError(ValueError):
    def __init__(self, message: str, separated_vertex: Optional[int] = None):
        super().__init__(message)
        self.separated_vertex = separated_vertex


class EdgeFileError(GraphError):
    def __init__(self, message: str, line_no: Optional[int] = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices 1..n_vertices; edges stored as (i, j) with i < j."""
    n_vertices: int
    edges: FrozenSet[Edge]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise GraphError(f"n_vertices must be positive, got {self.n_vertices}")
        norm = set()
        for i, j in self.edges:
            if i == j:
                raise GraphError(f"loop at vertex {i}")
            a, b = (i, j) if i < j else (j, i)
            if a < 1 or b > self.n_vertices:
                raise GraphError(f"edge {{{i}, {j}}} outside vertex range 1..{self.n_vertices}")
            norm.add((a, b))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n_vertices + 1))
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def as_dict(self) -> Dict[str, Any]:
        return {"n_vertices": self.n_vertices, "edges": [list(e) for e in self.sorted_edges]}


def graph_from_edges(edges: Sequence[Edge], n_vertices: Optional[int] = None) -> Graph:
    edges = [tuple(e) for e in edges]
    if n_vertices is None:
        n_vertices = max((max(e) for e in edges), default=1)
    if len({tuple(sorted(e)) for e in edges}) != len(edges):
        raise GraphError("multiple edges are not allowed")
    return Graph(n_vertices=n_vertices, edges=frozenset(edges))


def cycle(n: int) -> Graph:
    return graph_from_edges([(i, i + 1) for i in range(1, n)] + [(1, n)], n)


def path(n: int) -> Graph:
    return graph_from_edges([(i, i + 1) for i in range(1, n)], n)


def complete_bipartite(m: int, n: int) -> Graph:
    """Parts {1..m} and {m+1..m+n}."""
    return graph_from_edges([(i, j) for i in range(1, m + 1) for j in range(m + 1, m + n + 1)], m + n)


def read_edge_file(path_: str) -> Graph:
    """One edge per line as "i j" with 1-based vertices; '#' comments allowed."""
    if not os.path.isfile(path_):
        raise FileNotFoundError(f"Edge file not found: {path_}")
    edges: List[Edge] = []
    seen = {}
    with open(path_, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeFileError(f"expected two vertex indices, got {line!r}", line_no)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeFileError(f"non-integer vertex in {line!r}", line_no)
            if i < 1 or j < 1:
                raise EdgeFileError(f"vertex indices are 1-based, got {line!r}", line_no)
            if i == j:
                raise EdgeFileError(f"loop at vertex {i}", line_no)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise EdgeFileError(f"multiple edge {key} (first on line {seen[key]})", line_no)
            seen[key] = line_no
            edges.append(key)
    if not edges:
        raise EdgeFileError("no edges found")
    return graph_from_edges(edges)


def _require_connected(g: Graph) -> None:
    ng = g.to_networkx()
    if nx.is_connected(ng):
        return
    first = nx.node_connected_component(ng, 1)
    separated = min(v for v in ng.nodes if v not in first)
    raise GraphError(f"graph is disconnected: vertex {separated} is not reachable from vertex 1", separated)


def symmetric_edge_polytope(g: Graph) -> VPolytope:
    """
    conv{+-(e_i - e_j) : {i, j} in E} in the hyperplane sum x = 0, identified
    with Z^{n-1} by dropping the last coordinate.
    """
    if not g.edges:
        raise GraphError("symmetric edge polytope needs at least one edge")
    _require_connected(g)
    n = g.n_vertices
    points: List[Tuple[int, ...]] = []
    seen = set()
    for i, j in g.sorted_edges:
        rho = [0] * n
        rho[i - 1], rho[j - 1] = 1, -1
        for v in (tuple(rho[:-1]), tuple(-c for c in rho[:-1])):
            if v not in seen:
                seen.add(v)
                points.append(v)
    rank = affine_rank(points)
    if rank != n - 1:
        raise GraphError(f"symmetric edge polytope has affine rank {rank}, expected {n - 1}")
    return VPolytope(ambient_dim=n - 1, vertices=tuple(points))


def crosspolytope(d: int) -> VPolytope:
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    verts = []
    for i in range(d):
        for s in (1, -1):
            verts.append(tuple(s if j == i else 0 for j in range(d)))
    return VPolytope(ambient_dim=d, vertices=tuple(verts))


def tree_delta_expected(d: int) -> DeltaVector:
    """Binomial row (C(d, 0), ..., C(d, d)) of the unit crosspolytope."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return DeltaVector(tuple(comb(d, i) for i in range(d + 1)))


def k2m_delta(d: int) -> DeltaVector:
    """
    Coefficients of (1 + x)^{d-3} (1 + 2(d-3)x + x^2) for K(2, d-2), padded to
    length d + 1. The polytope itself has dimension d - 1, so the last entry is 0.
    """
    if d < 4:
        raise GraphError(f"K(2, d-2) needs d >= 4, got {d}")
    one_plus_x = RationalPolynomial.from_coeffs([1, 1])
    poly = one_plus_x ** (d - 3) * RationalPolynomial.from_coeffs([1, 2 * (d - 3), 1])
    entries = [int(c) for c in poly.coeffs]
    return DeltaVector(tuple(entries)).padded(d + 1)


# -- enumeration ---------------------------------------------------------------

def _canonical_edges(n: int, adj: List[List[bool]]) -> Tuple[Tuple[int, ...], FrozenSet[Edge]]:
    """
    Minimal adjacency bit-string over the vertex orderings sorted by
    (degree, sorted neighbour degrees), descending.
    """
    deg = [sum(row) for row in adj]
    key = [(deg[v], tuple(sorted(deg[u] for u in range(n) if adj[v][u]))) for v in range(n)]
    classes: Dict[Any, List[int]] = {}
    for v in range(n):
        classes.setdefault(key[v], []).append(v)
    ordered = [classes[k] for k in sorted(classes, reverse=True)]
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]

    best: Optional[Tuple[int, ...]] = None
    best_perm: Optional[Tuple[int, ...]] = None
    for parts in itertools.product(*(itertools.permutations(c) for c in ordered)):
        perm = tuple(v for part in parts for v in part)
        bits = tuple(1 if adj[perm[a]][perm[b]] else 0 for a, b in pairs)
        if best is None or bits < best:
            best, best_perm = bits, perm
    edges = frozenset((a + 1, b + 1) for (a, b), bit in zip(pairs, best) if bit)
    return best, edges


def canonical_form(g: Graph) -> Graph:
    n = g.n_vertices
    adj = [[False] * n for _ in range(n)]
    for i, j in g.edges:
        adj[i - 1][j - 1] = adj[j - 1][i - 1] = True
    _, edges = _canonical_edges(n, adj)
    return Graph(n_vertices=n, edges=edges)


def _all_graphs_up_to_iso(n: int) -> Dict[Tuple[int, ...], FrozenSet[Edge]]:
    """Every graph on n vertices up to isomorphism, grown one vertex at a time."""
    level: Dict[Tuple[int, ...], FrozenSet[Edge]] = {(): frozenset()}
    for m in range(2, n + 1):
        nxt: Dict[Tuple[int, ...], FrozenSet[Edge]] = {}
        for edges in level.values():
            for mask in range(1 << (m - 1)):
                adj = [[False] * m for _ in range(m)]
                for a, b in edges:
                    adj[a - 1][b - 1] = adj[b - 1][a - 1] = True
                for v in range(m - 1):
                    if mask >> v & 1:
                        adj[v][m - 1] = adj[m - 1][v] = True
                bits, canon = _canonical_edges(m, adj)
                nxt.setdefault(bits, canon)
        level = nxt
        logger.debug("graphs on %d vertices up to isomorphism: %d", m, len(level))
    return level


def enumerate_connected_graphs(n: int, dedup: bool = True) -> List[Graph]:
    """
    All connected simple graphs on n labeled vertices, or one canonical
    representative per isomorphism class when dedup is set.
    """
    if n < 1:
        raise GraphError(f"n must be positive, got {n}")
    if n > MAX_ENUMERATION_VERTICES:
        raise GraphError(f"graph enumeration is limited to {MAX_ENUMERATION_VERTICES} vertices, got {n}")
    out: List[Graph] = []
    if dedup:
        classes = _all_graphs_up_to_iso(n)
        for bits in sorted(classes, key=lambda b: (sum(b), tuple(-x for x in b))):
            g = Graph(n_vertices=n, edges=classes[bits])
            if g.is_connected():
                out.append(g)
    else:
        pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
        for mask in range(1 << len(pairs)):
            g = Graph(n_vertices=n, edges=frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))
            if g.is_connected():
                out.append(g)
    return out


# -- analysis ----------------------------------------------------------------------

@dataclass
class GraphRecord:
    graph: Graph
    dim: int = 0
    ehrhart: Optional[RationalPolynomial] = None
    delta: Optional[DeltaVector] = None
    gorenstein: Optional[bool] = None
    violations: List[str] = field(default_factory=list)
    report: Optional[RootReport] = None
    numeric_on_line: Optional[bool] = None
    root_symmetry: Optional[bool] = None
    certificate: Optional[Certificate] = None
    critical_line: Optional[bool] = None
    worst_root: Optional[complex] = None
    error: Optional[str] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "graph": self.graph.as_dict(),
            "dim": self.dim,
            "ehrhart_polynomial": None if self.ehrhart is None else format_polynomial(self.ehrhart),
            "delta": None if self.delta is None else self.delta.as_list(),
            "gorenstein": self.gorenstein,
            "violations": list(self.violations),
            "roots": None if self.report is None else self.report.as_dict(),
            "numeric_on_line": self.numeric_on_line,
            "root_symmetry": self.root_symmetry,
            "certificate": None if self.certificate is None else self.certificate.as_dict(),
            "critical_line": self.critical_line,
            "worst_root": None if self.worst_root is None else {"re": self.worst_root.real, "im": self.worst_root.imag},
            "error": self.error,
        }


def analyze_graph(
    g: Graph,
    tolerances: Tolerances = Tolerances(),
    limits: Limits = Limits(),
    seed: int = 0,
    jobs: int = 1,
) -> GraphRecord:
    """
    P_G, i(P_G, n) by interpolation, delta, numeric roots and the exact
    critical-line certificate. For odd dimension -1/2 is a forced root of a
    Gorenstein polytope and is divided out first.
    """
    _require_connected(g)
    canon = canonical_form(g)
    rec = GraphRecord(graph=canon)
    p = symmetric_edge_polytope(canon)
    d = p.ambient_dim
    rec.dim = d
    geometry = GeometryLimits(limits.max_vertices, limits.max_ambient_dim)
    rec.ehrhart = ehrhart_by_interpolation(p, jobs=jobs, limits=geometry)
    rec.delta = delta_from_ehrhart(rec.ehrhart, d)
    rec.gorenstein = is_gorenstein(rec.delta)
    rec.violations = [str(v) for v in validate_delta(rec.delta)]

    roots = find_roots_numeric(rec.ehrhart, tolerances, limits.max_iterations, seed)
    rec.report = classify_roots(roots, d, tolerances)
    worst = max(roots, key=lambda r: abs(r.re + 0.5))
    rec.worst_root = worst.value
    rec.numeric_on_line = abs(worst.re + 0.5) <= tolerances.classify
    rec.root_symmetry = check_root_symmetry([r.value for r in roots], tolerances.distinct)
    if rec.gorenstein and not rec.root_symmetry:
        logger.warning("graph %s: roots of a Gorenstein polytope are not mirrored about Re = -1/2", canon.sorted_edges)

    known = [Fraction(-1, 2)] if d % 2 == 1 else []
    rec.certificate = verify_critical_line_exact(rec.ehrhart, known)
    rec.critical_line = rec.certificate.passed
    if rec.certificate.passed != rec.numeric_on_line:
        logger.warning(
            "graph %s: exact certificate %s disagrees with numeric critical-line verdict %s",
            canon.sorted_edges, rec.certificate.verdict, rec.numeric_on_line,
        )
    return rec


def _analyze_safely(args) -> GraphRecord:
    g, tolerances, limits, seed = args
    try:
        return analyze_graph(g, tolerances, limits, seed)
    except Exception as e:
        logger.error("graph %s failed: %s", g.sorted_edges, e)
        return GraphRecord(graph=g, dim=g.n_vertices - 1, error=str(e))


def scan_graphs(
    n_max: int,
    tolerances: Tolerances = Tolerances(),
    limits: Limits = Limits(),
    seed: int = 0,
    jobs: int = 1,
    n_min: int = 2,
) -> Iterator[GraphRecord]:
    """
    One record per connected graph (up to isomorphism) on n_min..n_max
    vertices, streamed in enumeration order. Failures are recorded, not raised.
    """
    if n_max > limits.max_graph_vertices:
        raise GraphError(f"scan is limited to {limits.max_graph_vertices} vertices, got {n_max}")
    graphs = [g for n in range(max(2, n_min), n_max + 1) for g in enumerate_connected_graphs(n, dedup=True)]
    logger.info("scanning %d connected graphs on %d..%d vertices", len(graphs), max(2, n_min), n_max)
    tasks = [(g, tolerances, limits, seed) for g in graphs]
    workers = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)
    if workers <= 1:
        for t in tasks:
            yield _analyze_safely(t)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_analyze_safely, tasks)

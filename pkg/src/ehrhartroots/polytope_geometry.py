from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import cdd
import numpy as np
import sympy as sp

logger = logging.getLogger(__name__)

LatticePoint = Tuple[int, ...]

CLOSED = "closed"
INTERIOR = "interior"

DEFAULT_MAX_VERTICES = 64
DEFAULT_MAX_AMBIENT_DIM = 8

NUMBER_TYPE = "fraction"


class DimensionMismatchError(ValueError):
    pass


class DegeneratePolytopeError(ValueError):
    def __init__(self, rank: int, ambient_dim: int):
        super().__init__(f"Polytope is not full-dimensional: affine rank {rank} < ambient dimension {ambient_dim}")
        self.rank = rank
        self.ambient_dim = ambient_dim


class LimitExceededError(ValueError):
    pass


class InteriorPointError(RuntimeError):
    def __init__(self, count: int):
        if count == 0:
            msg = "no interior point"
        else:
            msg = f"interior point not unique: found at least {count}"
        super().__init__(msg)
        self.count = count


class VertexFileError(ValueError):
    def __init__(self, message: str, line_no: Optional[int] = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class VPolytope:
    ambient_dim: int
    vertices: Tuple[LatticePoint, ...]

    def __post_init__(self):
        verts = tuple(tuple(int(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if self.ambient_dim < 1:
            raise ValueError(f"ambient_dim must be positive, got {self.ambient_dim}")
        if not verts:
            raise ValueError("a polytope needs at least one vertex")
        for v in verts:
            if len(v) != self.ambient_dim:
                raise DimensionMismatchError(f"vertex {v} has length {len(v)}, expected {self.ambient_dim}")
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertices")

    @staticmethod
    def from_points(points: Sequence[Sequence[int]]) -> "VPolytope":
        pts = [tuple(int(c) for c in p) for p in points]
        if not pts:
            raise ValueError("a polytope needs at least one vertex")
        return VPolytope(ambient_dim=len(pts[0]), vertices=tuple(pts))

    def as_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class HRep:
    """Facet system: every row (normal, rhs) encodes normal . x <= rhs."""
    rows: Tuple[Tuple[Tuple[int, ...], int], ...]

    @property
    def ambient_dim(self) -> int:
        return len(self.rows[0][0]) if self.rows else 0

    def as_dict(self) -> dict:
        return {"rows": [{"normal": list(a), "rhs": b} for a, b in self.rows]}


def affine_rank(vertices: Sequence[LatticePoint]) -> int:
    if len(vertices) <= 1:
        return 0
    base = vertices[0]
    diffs = sp.Matrix([[c - b for c, b in zip(v, base)] for v in vertices[1:]])
    return int(diffs.rank())


def _check_full_dimensional(p: VPolytope) -> None:
    rank = affine_rank(p.vertices)
    if rank < p.ambient_dim:
        raise DegeneratePolytopeError(rank, p.ambient_dim)


def _primitive(vec: Sequence[int]) -> Tuple[int, ...]:
    g = 0
    for c in vec:
        g = math.gcd(g, c)
    if g == 0:
        return tuple(vec)
    return tuple(c // g for c in vec)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _integral_row(row: Sequence[Fraction]) -> Tuple[int, ...]:
    den = math.lcm(*(Fraction(c).denominator for c in row))
    return _primitive([int(Fraction(c) * den) for c in row])


def _cdd_inequalities(vertices: Sequence[LatticePoint]) -> List[Tuple[Tuple[int, ...], int]]:
    """Rows (normal, rhs) of normal . x <= rhs, computed by cdd in exact arithmetic."""
    gens = cdd.Matrix([[1] + list(v) for v in vertices], number_type=NUMBER_TYPE)
    gens.rep_type = cdd.RepType.GENERATOR
    ineq = cdd.Polyhedron(gens).get_inequalities()
    if ineq.lin_set:
        raise RuntimeError(f"cdd reported equations {sorted(ineq.lin_set)} for a full-dimensional polytope")
    rows = []
    # cdd row (b, a) encodes b + a . x >= 0
    for i in range(ineq.row_size):
        scaled = _integral_row(ineq[i])
        rows.append((tuple(-c for c in scaled[1:]), scaled[0]))
    logger.debug("cdd: %d generators -> %d inequalities", len(vertices), ineq.row_size)
    return rows


@dataclass(frozen=True)
class GeometryLimits:
    max_vertices: int = DEFAULT_MAX_VERTICES
    max_ambient_dim: int = DEFAULT_MAX_AMBIENT_DIM


DEFAULT_LIMITS = GeometryLimits()


@lru_cache(maxsize=256)
def facet_enumeration(p: VPolytope, limits: GeometryLimits = DEFAULT_LIMITS) -> HRep:
    """
    Exact integral facet system of a full-dimensional lattice polytope. cdd runs
    the double description method in fraction mode; each row is rescaled to a
    primitive integral normal with rhs = max over the vertices.
    """
    if len(p.vertices) > limits.max_vertices:
        raise LimitExceededError(f"{len(p.vertices)} vertices exceeds the limit {limits.max_vertices}")
    if p.ambient_dim > limits.max_ambient_dim:
        raise LimitExceededError(f"ambient dimension {p.ambient_dim} exceeds the limit {limits.max_ambient_dim}")
    _check_full_dimensional(p)

    rows = _cdd_inequalities(p.vertices)

    facets = set()
    for a, _ in rows:
        normal = _primitive(a)
        if not any(normal):
            continue
        rhs = max(_dot(normal, v) for v in p.vertices)
        facets.add((normal, rhs))
    h = HRep(rows=tuple(sorted(facets)))
    logger.debug("facet_enumeration: %d vertices in R^%d -> %d facets", len(p.vertices), p.ambient_dim, len(h.rows))
    return h


def contains(h: HRep, pt: Sequence[int], strict: bool = False) -> bool:
    if h.rows and len(pt) != h.ambient_dim:
        raise DimensionMismatchError(f"point of length {len(pt)} against facets in R^{h.ambient_dim}")
    if strict:
        return all(_dot(a, pt) < b for a, b in h.rows)
    return all(_dot(a, pt) <= b for a, b in h.rows)


@dataclass
class _Enumerator:
    """Bounding box walk with per-facet bound propagation on each coordinate prefix."""
    normals: np.ndarray     # (m, d)
    rhs: np.ndarray         # (m,)
    lo: np.ndarray          # (d,)
    hi: np.ndarray          # (d,)
    suffix_min: np.ndarray  # (m, d): min contribution of coordinates j+1..d-1

    @staticmethod
    def build(p: VPolytope, h: HRep, dilation: int, mode: str) -> "_Enumerator":
        if mode not in (CLOSED, INTERIOR):
            raise ValueError(f"Unknown counting mode: {mode!r}")
        normals = np.array([a for a, _ in h.rows], dtype=np.int64)
        # integer points: a . x < b  <=>  a . x <= b - 1
        rhs = np.array([b * dilation for _, b in h.rows], dtype=np.int64)
        if mode == INTERIOR:
            rhs = rhs - 1
        verts = np.array(p.vertices, dtype=np.int64)
        lo = verts.min(axis=0) * dilation
        hi = verts.max(axis=0) * dilation
        contrib = np.minimum(normals * lo, normals * hi)
        d = p.ambient_dim
        suffix_min = np.zeros_like(contrib)
        for j in range(d - 2, -1, -1):
            suffix_min[:, j] = suffix_min[:, j + 1] + contrib[:, j + 1]
        return _Enumerator(normals, rhs, lo, hi, suffix_min)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def coordinate_range(self, j: int, partial: np.ndarray) -> Tuple[int, int]:
        col = self.normals[:, j]
        slack = self.rhs - partial - self.suffix_min[:, j]
        zero = col == 0
        if np.any(slack[zero] < 0):
            return 1, 0
        lower, upper = int(self.lo[j]), int(self.hi[j])
        pos = col > 0
        if np.any(pos):
            upper = min(upper, int(np.min(slack[pos] // col[pos])))
        neg = col < 0
        if np.any(neg):
            lower = max(lower, int(np.max(-((-slack[neg]) // col[neg]))))
        return lower, upper

    def count(self, j: int, partial: np.ndarray, first: Optional[Tuple[int, int]] = None) -> int:
        lower, upper = first if first is not None else self.coordinate_range(j, partial)
        if lower > upper:
            return 0
        if j == self.dim - 1:
            return upper - lower + 1
        col = self.normals[:, j]
        total = 0
        for x in range(lower, upper + 1):
            total += self.count(j + 1, partial + col * x)
        return total

    def points(self, j: int, partial: np.ndarray, prefix: Tuple[int, ...]) -> Iterator[LatticePoint]:
        lower, upper = self.coordinate_range(j, partial)
        col = self.normals[:, j]
        for x in range(lower, upper + 1):
            if j == self.dim - 1:
                yield prefix + (x,)
            else:
                yield from self.points(j + 1, partial + col * x, prefix + (x,))


def _count_slab(args) -> int:
    enum, lower, upper = args
    zero = np.zeros(enum.normals.shape[0], dtype=np.int64)
    return enum.count(0, zero, first=(lower, upper))


def _resolve_jobs(jobs: int) -> int:
    if jobs and jobs > 0:
        return jobs
    return os.cpu_count() or 1


def count_lattice_points(
    p: VPolytope,
    dilation: int = 1,
    mode: str = CLOSED,
    jobs: int = 1,
    limits: GeometryLimits = DEFAULT_LIMITS,
) -> int:
    """
    Number of lattice points of dilation * p (closed) or of its interior.
    With jobs > 1 the outermost coordinate range is split into slabs whose
    counts are summed.
    """
    if dilation < 1:
        raise ValueError(f"dilation must be >= 1, got {dilation}")
    h = facet_enumeration(p, limits)
    enum = _Enumerator.build(p, h, dilation, mode)
    zero = np.zeros(len(h.rows), dtype=np.int64)
    lower, upper = enum.coordinate_range(0, zero)
    workers = _resolve_jobs(jobs)
    if workers <= 1 or upper - lower < 2 or enum.dim == 1:
        total = enum.count(0, zero, first=(lower, upper))
    else:
        bounds = np.array_split(np.arange(lower, upper + 1), min(workers, upper - lower + 1))
        tasks = [(enum, int(b[0]), int(b[-1])) for b in bounds if len(b)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            total = sum(pool.map(_count_slab, tasks))
    logger.debug("count_lattice_points: dilation %d, mode %s -> %d", dilation, mode, total)
    return total


def lattice_points(
    p: VPolytope,
    dilation: int = 1,
    mode: str = CLOSED,
    limits: GeometryLimits = DEFAULT_LIMITS,
) -> Iterator[LatticePoint]:
    h = facet_enumeration(p, limits)
    enum = _Enumerator.build(p, h, dilation, mode)
    return enum.points(0, np.zeros(len(h.rows), dtype=np.int64), ())


def find_unique_interior_point(p: VPolytope, limits: GeometryLimits = DEFAULT_LIMITS) -> LatticePoint:
    found: List[LatticePoint] = []
    for pt in lattice_points(p, 1, INTERIOR, limits):
        found.append(pt)
        if len(found) > 1:
            break
    if len(found) != 1:
        if found:
            raise InteriorPointError(count_lattice_points(p, 1, INTERIOR, limits=limits))
        raise InteriorPointError(0)
    return found[0]


def dilate_translate(p: VPolytope, factor: int, shift: Sequence[int]) -> VPolytope:
    """v -> factor * v - shift, vertex order preserved."""
    if factor < 1:
        raise ValueError(f"factor must be positive, got {factor}")
    if len(shift) != p.ambient_dim:
        raise DimensionMismatchError(f"shift of length {len(shift)} against ambient dimension {p.ambient_dim}")
    verts = tuple(tuple(factor * c - s for c, s in zip(v, shift)) for v in p.vertices)
    return VPolytope(ambient_dim=p.ambient_dim, vertices=verts)


def is_fano(p: VPolytope, limits: GeometryLimits = DEFAULT_LIMITS) -> bool:
    """True iff the origin is the only interior lattice point."""
    found = []
    for pt in lattice_points(p, 1, INTERIOR, limits):
        found.append(pt)
        if len(found) > 1:
            return False
    return found == [tuple([0] * p.ambient_dim)]


def read_vertex_file(path: str) -> VPolytope:
    """One vertex per line, whitespace-separated integers; '#' comments and blank lines skipped."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Vertex file not found: {path}")
    points: List[LatticePoint] = []
    seen = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                pt = tuple(int(tok) for tok in line.split())
            except ValueError:
                raise VertexFileError(f"non-integer coordinate in {line!r}", line_no)
            if points and len(pt) != len(points[0]):
                raise VertexFileError(f"expected {len(points[0])} coordinates, got {len(pt)}", line_no)
            if pt in seen:
                raise VertexFileError(f"duplicate vertex {pt} (first on line {seen[pt]})", line_no)
            seen[pt] = line_no
            points.append(pt)
    if not points:
        raise VertexFileError("no vertices found")
    return VPolytope.from_points(points)

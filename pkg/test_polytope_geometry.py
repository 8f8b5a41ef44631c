from __future__ import annotations

import itertools
import os

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import DATA_DIR
from ehrhartroots.polytope_geometry import (
    CLOSED,
    INTERIOR,
    DegeneratePolytopeError,
    DimensionMismatchError,
    GeometryLimits,
    LimitExceededError,
    VertexFileError,
    VPolytope,
    affine_rank,
    contains,
    count_lattice_points,
    dilate_translate,
    facet_enumeration,
    find_unique_interior_point,
    is_fano,
    lattice_points,
    read_vertex_file,
)

CROSS2 = VPolytope.from_points([(1, 0), (-1, 0), (0, 1), (0, -1)])
TRIANGLE_Q2 = VPolytope.from_points([(1, 0), (0, 1), (-1, -1)])
SQUARE = VPolytope.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
P31 = VPolytope.from_points([(2, 0, -1), (0, 2, -1), (-2, -2, -1), (0, 0, 1)])


def _in_hull(vertices, pt) -> bool:
    """Caratheodory: pt is in the hull iff it lies in a simplex spanned by d + 1 of the vertices."""
    d = len(pt)
    target = sp.Matrix(list(pt) + [1])
    for subset in itertools.combinations(vertices, d + 1):
        m = sp.Matrix([[v[i] for v in subset] for i in range(d)] + [[1] * (d + 1)])
        if m.det() == 0:
            continue
        lam = m.solve(target)
        if all(x >= 0 for x in lam):
            return True
    return False


def test_facets_of_crosspolytope():
    h = facet_enumeration(CROSS2)
    assert len(h.rows) == 4
    assert {a for a, _ in h.rows} == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert all(b == 1 for _, b in h.rows)


def test_facets_of_unit_simplex():
    h = facet_enumeration(VPolytope.from_points([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    assert sorted(h.rows) == sorted([((-1, 0, 0), 0), ((0, -1, 0), 0), ((0, 0, -1), 0), ((1, 1, 1), 1)])


def test_facets_skip_non_vertex_points():
    # midpoint (0, 0) is not a vertex and must not produce a facet
    h = facet_enumeration(VPolytope.from_points([(1, 0), (-1, 0), (0, 1), (0, -1), (0, 0)]))
    assert len(h.rows) == 4


def test_contains():
    h = facet_enumeration(CROSS2)
    assert contains(h, (0, 0), strict=True)
    assert contains(h, (1, 0))
    assert not contains(h, (1, 0), strict=True)
    assert not contains(h, (1, 1))
    with pytest.raises(DimensionMismatchError):
        contains(h, (0, 0, 0))


def test_counts():
    cases = [
        (CROSS2, 1, CLOSED, 5),
        (CROSS2, 2, CLOSED, 13),
        (CROSS2, 1, INTERIOR, 1),
        (CROSS2, 2, INTERIOR, 5),
        (TRIANGLE_Q2, 1, CLOSED, 4),
        (TRIANGLE_Q2, 2, CLOSED, 10),
        (TRIANGLE_Q2, 1, INTERIOR, 1),
        (TRIANGLE_Q2, 2, INTERIOR, 4),
        (SQUARE, 1, CLOSED, 4),
        (SQUARE, 3, CLOSED, 16),
        (SQUARE, 1, INTERIOR, 0),
        (P31, 1, CLOSED, 15),
        (P31, 2, CLOSED, 65),
        (P31, 3, CLOSED, 175),
    ]
    for p, n, mode, expected in cases:
        assert count_lattice_points(p, n, mode) == expected, (p.vertices, n, mode)


def test_count_one_dimensional():
    seg = VPolytope.from_points([(-1,), (1,)])
    assert count_lattice_points(seg, 1) == 3
    assert count_lattice_points(seg, 4, INTERIOR) == 7


def test_parallel_count_matches_serial():
    assert count_lattice_points(P31, 3, CLOSED, jobs=2) == count_lattice_points(P31, 3, CLOSED, jobs=1)


def test_lattice_points_agree_with_count():
    pts = list(lattice_points(TRIANGLE_Q2, 2))
    assert len(pts) == 10
    assert len(set(pts)) == 10
    h2 = facet_enumeration(dilate_translate(TRIANGLE_Q2, 2, (0, 0)))
    assert all(contains(h2, pt) for pt in pts)


def test_degenerate_and_limits():
    with pytest.raises(DegeneratePolytopeError) as err:
        facet_enumeration(VPolytope.from_points([(0, 0), (1, 1), (2, 2)]))
    assert err.value.rank == 1
    with pytest.raises(LimitExceededError):
        facet_enumeration(CROSS2, GeometryLimits(max_vertices=3))
    with pytest.raises(LimitExceededError):
        facet_enumeration(CROSS2, GeometryLimits(max_ambient_dim=1))
    with pytest.raises(ValueError):
        count_lattice_points(CROSS2, 0)


def test_affine_rank():
    assert affine_rank([(0, 0)]) == 0
    assert affine_rank([(0, 0), (1, 1), (2, 2)]) == 1
    assert affine_rank(list(CROSS2.vertices)) == 2


def test_interior_point_and_fano():
    assert find_unique_interior_point(CROSS2) == (0, 0)
    assert is_fano(CROSS2)
    assert is_fano(P31)
    assert not is_fano(SQUARE)
    assert not is_fano(dilate_translate(CROSS2, 2, (0, 0)))


def test_dilate_translate():
    q = dilate_translate(SQUARE, 2, (1, 1))
    assert q.vertices == ((-1, -1), (1, -1), (-1, 1), (1, 1))
    with pytest.raises(DimensionMismatchError):
        dilate_translate(SQUARE, 2, (1,))


small_polygons = st.lists(
    st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=6, unique=True
)


@settings(max_examples=40, deadline=None)
@given(small_polygons)
def test_count_matches_hull_membership(points):
    assume(affine_rank(points) == 2)
    p = VPolytope.from_points(points)
    brute = sum(
        1
        for x in range(-3, 4)
        for y in range(-3, 4)
        if _in_hull(points, (x, y))
    )
    assert count_lattice_points(p, 1) == brute


@settings(max_examples=30, deadline=None)
@given(small_polygons, st.integers(1, 3))
def test_dilation_consistency(points, n):
    assume(affine_rank(points) == 2)
    p = VPolytope.from_points(points)
    scaled = dilate_translate(p, n, (0, 0))
    assert count_lattice_points(p, n) == count_lattice_points(scaled, 1)
    assert count_lattice_points(p, n, INTERIOR) == count_lattice_points(scaled, 1, INTERIOR)


def test_read_vertex_file(tmp_path):
    p = read_vertex_file(os.path.join(DATA_DIR, "crosspolytope2.txt"))
    assert p == CROSS2

    bad = tmp_path / "dup.txt"
    bad.write_text("# header\n1 0\n1 0\n", encoding="utf-8")
    with pytest.raises(VertexFileError) as err:
        read_vertex_file(str(bad))
    assert err.value.line_no == 3

    ragged = tmp_path / "ragged.txt"
    ragged.write_text("1 0\n0 1 2\n", encoding="utf-8")
    with pytest.raises(VertexFileError) as err:
        read_vertex_file(str(ragged))
    assert err.value.line_no == 2

    with pytest.raises(FileNotFoundError):
        read_vertex_file(str(tmp_path / "missing.txt"))


def _in_hull_numeric(vertices, pt) -> bool:
    """Float variant of _in_hull for the larger 3D grids."""
    d = len(pt)
    target = np.array(list(pt) + [1.0])
    for subset in itertools.combinations(vertices, d + 1):
        m = np.array([[v[i] for v in subset] for i in range(d)] + [[1.0] * (d + 1)])
        if abs(np.linalg.det(m)) < 1e-9:
            continue
        if np.all(np.linalg.solve(m, target) >= -1e-9):
            return True
    return False


small_polytopes_3d = st.lists(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)), min_size=4, max_size=7, unique=True
)


@settings(max_examples=25, deadline=None)
@given(small_polytopes_3d)
def test_membership_matches_hull_in_3d(points):
    assume(affine_rank(points) == 3)
    h = facet_enumeration(VPolytope.from_points(points))
    for pt in itertools.product(range(-2, 3), repeat=3):
        assert contains(h, pt) == _in_hull_numeric(points, pt), pt


@settings(max_examples=40, deadline=None)
@given(st.one_of(small_polygons, small_polytopes_3d))
def test_every_facet_is_tight_on_a_spanning_vertex_set(points):
    d = len(points[0])
    assume(affine_rank(points) == d)
    h = facet_enumeration(VPolytope.from_points(points))
    assert len(h.rows) >= d + 1
    for a, b in h.rows:
        assert all(sum(x * y for x, y in zip(a, v)) <= b for v in points)
        tight = [v for v in points if sum(x * y for x, y in zip(a, v)) == b]
        assert affine_rank(tight) == d - 1, (a, b, tight)


@settings(max_examples=30, deadline=None)
@given(small_polygons, st.integers(1, 3))
def test_counts_are_monotone(points, n):
    assume(affine_rank(points) == 2)
    p = VPolytope.from_points(points)
    assert count_lattice_points(p, n, INTERIOR) <= count_lattice_points(p, n)
    if contains(facet_enumeration(p), (0, 0)):
        assert count_lattice_points(p, n) <= count_lattice_points(p, n + 1)

from __future__ import annotations

from fractions import Fraction

import pytest

from ehrhartroots.ehrhart_engine import (
    check_functional_equation,
    delta_from_ehrhart,
    ehrhart_by_interpolation,
    is_gorenstein,
    validate_delta,
)
from ehrhartroots.exact_arith import RationalPolynomial
from ehrhartroots.family_construction import (
    FamilyParams,
    FamilyParamsError,
    F_polynomial,
    build_P,
    build_Q,
    build_Q_full,
    build_Qc,
    closed_form_P,
    closed_form_Qc,
    expected_delta_Q,
    expected_delta_Qc,
    expected_real_roots,
    factored_form_P,
    factorization_scale,
    family_gammas,
    interior_point,
    valid_params,
)
from ehrhartroots.polytope_geometry import count_lattice_points, is_fano

P = RationalPolynomial.from_coeffs


def test_params_validation():
    for k, d in [(3, 2), (-1, 3), (0, 0), (2, 3)]:
        with pytest.raises(FamilyParamsError):
            FamilyParams(k, d)
    assert FamilyParams(1, 3).factor == 2
    assert [(p.k, p.d) for p in valid_params(1, 3)] == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]


def test_build_examples():
    params = FamilyParams(1, 3)
    assert build_Q(params).vertices == ((1, 0, 0), (0, 1, 0), (-1, -1, 0))
    assert build_Qc(params).vertices == ((1, 0, 0), (0, 1, 0), (-1, -1, 0), (0, 0, 1))
    assert interior_point(params) == (0, 0, 1)
    assert build_P(params).vertices == ((2, 0, -1), (0, 2, -1), (-2, -2, -1), (0, 0, 1))
    assert build_Q(FamilyParams(0, 2)).vertices == ((0, 0),)
    assert build_Qc(FamilyParams(0, 2)).vertices == ((0, 0), (1, 0), (0, 1))
    with pytest.raises(FamilyParamsError):
        build_Q_full(FamilyParams(0, 2))


def test_interior_point_limit():
    with pytest.raises(FamilyParamsError):
        interior_point(FamilyParams(0, 9))


def test_closed_forms():
    assert closed_form_P(FamilyParams(1, 3)) == P([1, 4, 6, 4])
    assert closed_form_P(FamilyParams(1, 2)) == P([1, Fraction(3, 2), Fraction(3, 2)])
    # unit simplex: C(n + 2, 2)
    assert closed_form_Qc(FamilyParams(0, 2)) == P([1, Fraction(3, 2), Fraction(1, 2)])
    assert closed_form_Qc(FamilyParams(1, 3))(1) == 5


def test_expected_real_roots():
    assert expected_real_roots(FamilyParams(0, 2)) == [Fraction(-1, 3), Fraction(-2, 3)]
    assert expected_real_roots(FamilyParams(1, 2)) == []
    p = FamilyParams(1, 5)
    poly = closed_form_P(p)
    assert all(poly(r) == 0 for r in expected_real_roots(p))


def test_F_polynomial_examples():
    for d in range(1, 7):
        assert F_polynomial(FamilyParams(0, d)) == P([1])
    assert F_polynomial(FamilyParams(1, 2)) == P([6, 9, 9])
    assert F_polynomial(FamilyParams(1, 3)).degree == 2
    assert factorization_scale(FamilyParams(1, 3)) == Fraction(16, 24)


@pytest.mark.parametrize("params", valid_params(1, 12), ids=lambda p: f"k{p.k}-d{p.d}")
def test_factorization_identity(params):
    assert factored_form_P(params) == closed_form_P(params)
    assert F_polynomial(params).degree == 2 * params.k


@pytest.mark.parametrize("params", valid_params(1, 12), ids=lambda p: f"k{p.k}-d{p.d}")
def test_closed_form_delta_is_gorenstein(params):
    poly = closed_form_P(params)
    delta = delta_from_ehrhart(poly, params.d)
    assert is_gorenstein(delta)
    assert validate_delta(delta) == []
    assert check_functional_equation(poly, params.d)


def test_gammas():
    assert family_gammas(FamilyParams(1, 3)) == [Fraction(1, 2), Fraction(1), Fraction(3, 2)]
    assert family_gammas(FamilyParams(0, 4)) == [Fraction(1, 2)]


@pytest.mark.parametrize("params", valid_params(1, 5), ids=lambda p: f"k{p.k}-d{p.d}")
def test_closed_form_Qc_matches_counts(params):
    qc = build_Qc(params)
    form = closed_form_Qc(params)
    for n in range(1, 5):
        assert count_lattice_points(qc, n) == form(n), n


@pytest.mark.parametrize("params", valid_params(1, 4), ids=lambda p: f"k{p.k}-d{p.d}")
def test_dilation_identity(params):
    p = build_P(params)
    qc = build_Qc(params)
    for n in range(1, params.d + 1):
        assert count_lattice_points(p, n) == count_lattice_points(qc, params.factor * n)


@pytest.mark.parametrize("params", valid_params(1, 5), ids=lambda p: f"k{p.k}-d{p.d}")
def test_P_is_fano(params):
    assert is_fano(build_P(params))


@pytest.mark.parametrize("k", [1, 2])
def test_delta_of_Q(k):
    q = build_Q_full(FamilyParams(k, 2 * k))
    delta = delta_from_ehrhart(ehrhart_by_interpolation(q), 2 * k)
    assert delta.entries == expected_delta_Q(FamilyParams(k, 2 * k))


@pytest.mark.slow
def test_delta_of_Q_six_dimensional():
    q = build_Q_full(FamilyParams(3, 6))
    delta = delta_from_ehrhart(ehrhart_by_interpolation(q), 6)
    assert delta.entries == (1,) * 7


@pytest.mark.parametrize("params", valid_params(1, 5), ids=lambda p: f"k{p.k}-d{p.d}")
def test_delta_of_Qc(params):
    delta = delta_from_ehrhart(ehrhart_by_interpolation(build_Qc(params)), params.d)
    assert delta.entries == expected_delta_Qc(params)


@pytest.mark.slow
@pytest.mark.parametrize("params", [p for p in valid_params(6, 6)], ids=lambda p: f"k{p.k}-d{p.d}")
def test_delta_of_Qc_six_dimensional(params):
    delta = delta_from_ehrhart(ehrhart_by_interpolation(build_Qc(params)), params.d)
    assert delta.entries == expected_delta_Qc(params)

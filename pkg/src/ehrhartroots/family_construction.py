from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import List, Tuple

from .exact_arith import RationalPolynomial, binomial_poly
from .polytope_geometry import (
    LatticePoint,
    VPolytope,
    dilate_translate,
    find_unique_interior_point,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_INTERIOR_D = 8


class FamilyParamsError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyParams:
    """(k, d) with 0 <= 2k <= d: P has 2k imaginary and d - 2k real Ehrhart roots."""
    k: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise FamilyParamsError(f"d must be positive, got d={self.d}")
        if self.k < 0 or 2 * self.k > self.d:
            raise FamilyParamsError(f"need 0 <= 2k <= d, got k={self.k}, d={self.d}")

    @property
    def factor(self) -> int:
        """The dilation factor d - 2k + 1."""
        return self.d - 2 * self.k + 1

    def as_dict(self) -> dict:
        return {"k": self.k, "d": self.d}


def valid_params(d_min: int, d_max: int) -> List[FamilyParams]:
    return [FamilyParams(k, d) for d in range(max(1, d_min), d_max + 1) for k in range(d // 2 + 1)]


def _unit(d: int, i: int) -> Tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(d))


def build_Q(params: FamilyParams) -> VPolytope:
    """
    conv(e_1, ..., e_2k, -(e_1 + ... + e_2k)) inside R^d; for k = 0 the single
    point at the origin.
    """
    d, m = params.d, 2 * params.k
    if m == 0:
        return VPolytope(ambient_dim=d, vertices=(tuple([0] * d),))
    verts = [_unit(d, i) for i in range(m)]
    verts.append(tuple(-1 if j < m else 0 for j in range(d)))
    return VPolytope(ambient_dim=d, vertices=tuple(verts))


def build_Q_full(params: FamilyParams) -> VPolytope:
    """Q re-embedded in R^{2k} (its own span), so it is full-dimensional. Needs k >= 1."""
    m = 2 * params.k
    if m == 0:
        raise FamilyParamsError("Q is a point for k = 0; it has no full-dimensional model")
    q = build_Q(params)
    return VPolytope(ambient_dim=m, vertices=tuple(v[:m] for v in q.vertices))


def build_Qc(params: FamilyParams) -> VPolytope:
    """conv(Q and e_{2k+1}, ..., e_d)"""
    d, m = params.d, 2 * params.k
    verts = list(build_Q(params).vertices)
    verts.extend(_unit(d, i) for i in range(m, d))
    return VPolytope(ambient_dim=d, vertices=tuple(verts))


def interior_point(params: FamilyParams, max_d: int = DEFAULT_MAX_INTERIOR_D) -> LatticePoint:
    """The unique interior lattice point a of (d - 2k + 1) Q^c, found by enumeration."""
    if params.d > max_d:
        raise FamilyParamsError(f"d={params.d} exceeds the interior-point enumeration limit {max_d}")
    zero = tuple([0] * params.d)
    dilated = dilate_translate(build_Qc(params), params.factor, zero)
    a = find_unique_interior_point(dilated)
    logger.debug("interior point of %d*Q^c for (k=%d, d=%d): %s", params.factor, params.k, params.d, a)
    return a


def build_P(params: FamilyParams, max_d: int = DEFAULT_MAX_INTERIOR_D) -> VPolytope:
    """P = (d - 2k + 1) Q^c - a"""
    a = interior_point(params, max_d)
    return dilate_translate(build_Qc(params), params.factor, a)


def closed_form_Qc(params: FamilyParams) -> RationalPolynomial:
    """i(Q^c, n) = C(n + d + 1, d + 1) - C(n + d - 2k, d + 1)"""
    d, k = params.d, params.k
    return binomial_poly(d + 1, d + 1) - binomial_poly(d - 2 * k, d + 1)


def closed_form_P(params: FamilyParams) -> RationalPolynomial:
    """i(P, n) = i(Q^c, (d - 2k + 1) n)"""
    return closed_form_Qc(params).compose_linear(params.factor, 0)


def expected_real_roots(params: FamilyParams) -> List[Fraction]:
    """-i/(d - 2k + 1) for 1 <= i <= d - 2k, strictly decreasing."""
    return [Fraction(-i, params.factor) for i in range(1, params.d - 2 * params.k + 1)]


def F_polynomial(params: FamilyParams) -> RationalPolynomial:
    """
    F(n) = prod_{i=0}^{2k} (n + (d + 1 - i)/(d - 2k + 1)) - prod_{i=0}^{2k} (n - i/(d - 2k + 1))
    """
    d, k, c = params.d, params.k, params.factor
    upper = RationalPolynomial.product(
        RationalPolynomial.linear_factor(Fraction(-(d + 1 - i), c)) for i in range(2 * k + 1)
    )
    lower = RationalPolynomial.product(
        RationalPolynomial.linear_factor(Fraction(i, c)) for i in range(2 * k + 1)
    )
    return upper - lower


def factorization_scale(params: FamilyParams) -> Fraction:
    """(d - 2k + 1)^{d+1} / (d + 1)!"""
    return Fraction(params.factor ** (params.d + 1), factorial(params.d + 1))


def factored_form_P(params: FamilyParams) -> RationalPolynomial:
    """scale * prod_{i=1}^{d-2k} (n + i/(d-2k+1)) * F(n); equal to closed_form_P."""
    real_part = RationalPolynomial.product(
        RationalPolynomial.linear_factor(r) for r in expected_real_roots(params)
    )
    return (real_part * F_polynomial(params)).scale(factorization_scale(params))


def family_gammas(params: FamilyParams) -> List[Fraction]:
    """
    gamma_i = beta_i + 1/2 with beta_i = i/(d - 2k + 1), i = 0..2k; the
    alpha_i = -1 - beta_i are the negated shifts of F's first product.
    """
    return [Fraction(i, params.factor) + Fraction(1, 2) for i in range(2 * params.k + 1)]


def expected_delta_Q(params: FamilyParams) -> Tuple[int, ...]:
    return (1,) * (2 * params.k + 1)


def expected_delta_Qc(params: FamilyParams) -> Tuple[int, ...]:
    """Numerator 1 + t + ... + t^{2k} of the Ehrhart series of Q^c, padded to length d + 1."""
    return expected_delta_Q(params) + (0,) * (params.d - 2 * params.k)

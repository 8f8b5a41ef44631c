from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Any, Dict, List, Optional, Sequence

from .exact_arith import RationalPolynomial, binomial_poly, lagrange_interpolate
from .polytope_geometry import (
    CLOSED,
    INTERIOR,
    DEFAULT_LIMITS,
    GeometryLimits,
    VPolytope,
    count_lattice_points,
)

logger = logging.getLogger(__name__)


class EhrhartError(ValueError):
    pass


@dataclass(frozen=True)
class DeltaVector:
    """(delta_0, ..., delta_d); nonnegativity is checked by validate_delta, not assumed."""
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if not self.entries:
            raise EhrhartError("a delta-vector has at least one entry")

    @property
    def d(self) -> int:
        return len(self.entries) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def padded(self, length: int) -> "DeltaVector":
        if length < len(self.entries):
            raise EhrhartError(f"cannot pad a delta-vector of length {len(self.entries)} down to {length}")
        return DeltaVector(self.entries + (0,) * (length - len(self.entries)))

    def honest(self) -> "DeltaVector":
        """Trailing zeros stripped (the entry delta_0 always stays)."""
        entries = list(self.entries)
        while len(entries) > 1 and entries[-1] == 0:
            entries.pop()
        return DeltaVector(tuple(entries))

    def as_list(self) -> List[int]:
        return list(self.entries)


@dataclass
class Violation:
    kind: str     # "delta0" | "nonnegativity" | "lower_bound"
    index: int
    value: int

    def as_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "index": self.index, "value": self.value}

    def __str__(self) -> str:
        return f"{self.kind} at index {self.index} (value {self.value})"


@dataclass
class CheckResult:
    """Boolean verdict carrying the first failing dilation, when any."""
    ok: bool
    first_failure: Optional[int] = None
    details: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def ehrhart_by_interpolation(
    p: VPolytope,
    jobs: int = 1,
    limits: GeometryLimits = DEFAULT_LIMITS,
) -> RationalPolynomial:
    """
    i(P, n) from lattice counts at n = 0..d (i(P, 0) = 1).
    """
    d = p.ambient_dim
    points = [(0, Fraction(1))]
    for n in range(1, d + 1):
        c = count_lattice_points(p, n, CLOSED, jobs=jobs, limits=limits)
        logger.debug("ehrhart_by_interpolation: i(P, %d) = %d", n, c)
        points.append((n, Fraction(c)))
    poly = lagrange_interpolate(points)
    if poly.degree != d:
        raise EhrhartError(f"degenerate counts: interpolated degree {poly.degree} != dimension {d}")
    if poly.leading <= 0:
        raise EhrhartError(f"degenerate counts: leading coefficient {poly.leading} is not positive")
    return poly


def delta_from_ehrhart(i_poly: RationalPolynomial, d: int) -> DeltaVector:
    """
    delta_i = sum_{j=0}^{i} (-1)^j C(d+1, j) i(i - j), the coefficients of
    (1 - t)^{d+1} * sum_n i(n) t^n truncated at degree d.
    """
    if i_poly.degree != d:
        raise EhrhartError(f"expected a degree-{d} polynomial, got degree {i_poly.degree}")
    values = []
    for m in range(d + 1):
        v = i_poly(m)
        if v.denominator != 1:
            raise EhrhartError(f"non-integral value i({m}) = {v}")
        values.append(v.numerator)
    if values[0] != 1:
        raise EhrhartError(f"i(0) = {values[0]}, expected 1")
    entries = []
    for i in range(d + 1):
        delta_i = sum((-1) ** j * comb(d + 1, j) * values[i - j] for j in range(i + 1))
        if delta_i < 0:
            raise EhrhartError(f"nonnegativity violated: delta_{i} = {delta_i}")
        entries.append(delta_i)
    return DeltaVector(tuple(entries))


def ehrhart_from_delta(delta: DeltaVector) -> RationalPolynomial:
    """i(P, n) = sum_i delta_i C(n + d - i, d)"""
    d = delta.d
    out = RationalPolynomial()
    for i, delta_i in enumerate(delta.entries):
        if delta_i:
            out = out + binomial_poly(d - i, d).scale(delta_i)
    return out


def ehrhart_series_numerator(delta: DeltaVector) -> RationalPolynomial:
    """Numerator of sum_n i(P, n) t^n over (1 - t)^{d+1}, as a polynomial in t."""
    return RationalPolynomial.from_coeffs(delta.entries)


def check_reciprocity(
    p: VPolytope,
    i_poly: RationalPolynomial,
    n_max: int,
    jobs: int = 1,
    limits: GeometryLimits = DEFAULT_LIMITS,
) -> CheckResult:
    """(-1)^d i(P, -n) against brute-force interior counts for 1 <= n <= n_max."""
    d = p.ambient_dim
    sign = -1 if d % 2 else 1
    for n in range(1, n_max + 1):
        expected = sign * i_poly(-n)
        interior = count_lattice_points(p, n, INTERIOR, jobs, limits)
        if expected != interior:
            logger.warning("reciprocity fails at n=%d: (-1)^d i(-n) = %s, interior count %d", n, expected, interior)
            return CheckResult(False, n, [f"n={n}: (-1)^d i(-n) = {expected}, interior = {interior}"])
    return CheckResult(True)


def is_gorenstein(delta: DeltaVector) -> bool:
    """Palindromic delta-vector: delta_i = delta_{d-i}."""
    return delta.entries == delta.entries[::-1]


def check_functional_equation(i_poly: RationalPolynomial, d: int, n_max: int = 0) -> bool:
    """
    i(n) = (-1)^d i(-n - 1), tested at max(d, n_max) + 1 points, which decides
    the polynomial identity exactly.
    """
    sign = -1 if d % 2 else 1
    return all(i_poly(n) == sign * i_poly(-n - 1) for n in range(max(d, n_max) + 1))


def validate_delta(delta: DeltaVector) -> List[Violation]:
    out: List[Violation] = []
    e = delta.entries
    if e[0] != 1:
        out.append(Violation("delta0", 0, e[0]))
    for i, v in enumerate(e):
        if v < 0:
            out.append(Violation("nonnegativity", i, v))
    d = delta.d
    if d >= 1 and e[d] != 0:
        for i in range(1, d):
            if e[i] < e[1]:
                out.append(Violation("lower_bound", i, e[i]))
    return out


def check_delta_identities(
    p: VPolytope,
    delta: DeltaVector,
    i_poly: Optional[RationalPolynomial] = None,
    jobs: int = 1,
    limits: GeometryLimits = DEFAULT_LIMITS,
) -> CheckResult:
    """
    delta_1 = |P cap Z^d| - (d + 1) and delta_d = |interior cap Z^d|, by brute
    force. With i_poly, also sum(delta) = d! * leading coefficient (normalized volume).
    """
    d = p.ambient_dim
    closed = count_lattice_points(p, 1, CLOSED, jobs, limits)
    interior = count_lattice_points(p, 1, INTERIOR, jobs, limits)
    details = []
    if d >= 1 and delta[1] != closed - (d + 1):
        details.append(f"delta_1 = {delta[1]} but |P cap Z^d| - (d+1) = {closed - (d + 1)}")
    if delta[d] != interior:
        details.append(f"delta_d = {delta[d]} but interior count = {interior}")
    if i_poly is not None:
        volume = i_poly.leading * factorial(d)
        if sum(delta.entries) != volume:
            details.append(f"sum(delta) = {sum(delta.entries)} but d! * leading coefficient = {volume}")
    return CheckResult(not details, 1 if details else None, details)


def check_root_symmetry(roots: Sequence[complex], tol: float = 1e-6) -> bool:
    """
    Gorenstein root sets are invariant under z -> -1 - conj(z); each root must
    have a partner within tol.
    """
    for z in roots:
        mirror = complex(-1.0 - z.real, z.imag)
        if not any(abs(w - mirror) <= tol for w in roots):
            return False
    return True

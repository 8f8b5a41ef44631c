from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[int, Fraction, str]

NEG_INF = float("-inf")
POS_INF = float("inf")


class PolynomialError(ValueError):
    pass


class DuplicateAbscissaError(PolynomialError):
    def __init__(self, x: int):
        super().__init__(f"duplicate abscissa {x} in interpolation points")
        self.x = x


class NonzeroRemainderError(PolynomialError):
    def __init__(self, remainder: "RationalPolynomial"):
        super().__init__(f"nonzero remainder in exact division: {remainder}")
        self.remainder = remainder


class PolynomialParseError(PolynomialError):
    pass


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"Unsupported rational type: {type(value)}")


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _strip(coeffs: Iterable[Fraction]) -> Tuple[Fraction, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class RationalPolynomial:
    """
    Dense univariate polynomial over the rationals.
    coeffs[i] is the coefficient of n**i; the highest entry is nonzero and the
    empty tuple is the zero polynomial.
    """
    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(to_rational(c) for c in self.coeffs))

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_coeffs(coeffs: Iterable[RationalLike]) -> "RationalPolynomial":
        return RationalPolynomial(tuple(to_rational(c) for c in coeffs))

    @staticmethod
    def constant(c: RationalLike) -> "RationalPolynomial":
        return RationalPolynomial((to_rational(c),))

    @staticmethod
    def linear_factor(root: RationalLike) -> "RationalPolynomial":
        """n - root"""
        return RationalPolynomial((-to_rational(root), Fraction(1)))

    @staticmethod
    def product(factors: Iterable["RationalPolynomial"]) -> "RationalPolynomial":
        out = RationalPolynomial.constant(1)
        for f in factors:
            out = out * f
        return out

    # -- queries ----------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        x = to_rational(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_floats(self) -> List[float]:
        return [float(c) for c in self.coeffs]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return _as_poly(other) - self

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "RationalPolynomial":
        if power < 0:
            raise PolynomialError("negative polynomial power")
        out = RationalPolynomial.constant(1)
        for _ in range(power):
            out = out * self
        return out

    def scale(self, c: RationalLike) -> "RationalPolynomial":
        c = to_rational(c)
        return RationalPolynomial(tuple(x * c for x in self.coeffs))

    def divmod(self, other: "RationalPolynomial") -> Tuple["RationalPolynomial", "RationalPolynomial"]:
        other = _as_poly(other)
        if other.is_zero():
            raise PolynomialError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        if len(rem) - 1 < dq:
            return RationalPolynomial(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        for shift in range(len(rem) - 1 - dq, -1, -1):
            c = rem[shift + dq] / lead
            quot[shift] = c
            if c == 0:
                continue
            for i, b in enumerate(other.coeffs):
                rem[shift + i] -= c * b
        return RationalPolynomial(tuple(quot)), RationalPolynomial(tuple(rem[:dq]))

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def monic(self) -> "RationalPolynomial":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading)

    def primitive(self) -> "RationalPolynomial":
        """
        Scale by a positive rational so the coefficients become coprime
        integers. Signs are preserved, which keeps Sturm sign variations intact.
        """
        if self.is_zero():
            return self
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [int(c * den) for c in self.coeffs]
        g = 0
        for v in nums:
            g = math.gcd(g, v)
        return RationalPolynomial(tuple(Fraction(v, g) for v in nums))

    def compose_linear(self, a: RationalLike, b: RationalLike) -> "RationalPolynomial":
        """p(a*n + b)"""
        inner = RationalPolynomial((to_rational(b), to_rational(a)))
        out = RationalPolynomial()
        for c in reversed(self.coeffs):
            out = out * inner + RationalPolynomial.constant(c)
        return out

    def odd_coefficients(self) -> List[Tuple[int, Fraction]]:
        return [(i, c) for i, c in enumerate(self.coeffs) if i % 2 == 1 and c != 0]

    def even_part_in_square(self) -> "RationalPolynomial":
        """For p(y) = H(y**2), return H. Odd coefficients are ignored."""
        return RationalPolynomial(self.coeffs[0::2])

    def __str__(self) -> str:
        return format_polynomial(self)


def _as_poly(value) -> RationalPolynomial:
    if isinstance(value, RationalPolynomial):
        return value
    return RationalPolynomial.constant(value)


def poly_gcd(p: RationalPolynomial, q: RationalPolynomial) -> RationalPolynomial:
    """Monic greatest common divisor (zero only when both inputs are zero)."""
    a, b = p, q
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r.primitive()
    return a.monic()


def binomial_poly(shift: int, bottom: int) -> RationalPolynomial:
    """
    C(n + shift, bottom) read as a polynomial in n:
    (n+shift)(n+shift-1)...(n+shift-bottom+1) / bottom!
    """
    if bottom < 0:
        raise PolynomialError(f"binomial bottom must be nonnegative, got {bottom}")
    out = RationalPolynomial.constant(Fraction(1, math.factorial(bottom)))
    for j in range(bottom):
        out = out * RationalPolynomial((Fraction(shift - j), Fraction(1)))
    return out


def lagrange_interpolate(points: Sequence[Tuple[int, RationalLike]]) -> RationalPolynomial:
    """
    Unique polynomial of degree < len(points) through the given points.
    Master product prod(n - x_j) is divided back by each node to get the
    per-node numerators, then rescaled to the node's value.
    """
    if not points:
        raise PolynomialError("interpolation needs at least one point")
    xs = [int(x) for x, _ in points]
    ys = [to_rational(y) for _, y in points]
    seen = set()
    for x in xs:
        if x in seen:
            raise DuplicateAbscissaError(x)
        seen.add(x)

    master = RationalPolynomial.product(RationalPolynomial.linear_factor(x) for x in xs)
    out = RationalPolynomial()
    for x, y in zip(xs, ys):
        if y == 0:
            continue
        num, _ = master.divmod(RationalPolynomial.linear_factor(x))
        out = out + num.scale(y / num(x))
    return out


def exact_divide(p: RationalPolynomial, q: RationalPolynomial) -> RationalPolynomial:
    quot, rem = p.divmod(q)
    if not rem.is_zero():
        raise NonzeroRemainderError(rem)
    return quot


def squarefree_part(p: RationalPolynomial) -> RationalPolynomial:
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p
    return exact_divide(p, g)


def sturm_chain(p: RationalPolynomial) -> List[RationalPolynomial]:
    """Sturm chain of the square-free part of p, each member made primitive."""
    if p.is_zero():
        raise PolynomialError("Sturm chain of the zero polynomial")
    p0 = squarefree_part(p).primitive()
    chain = [p0]
    if p0.degree <= 0:
        return chain
    chain.append(p0.derivative().primitive())
    while True:
        _, rem = chain[-2].divmod(chain[-1])
        if rem.is_zero():
            break
        chain.append((-rem).primitive())
    return chain


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _sign_at(p: RationalPolynomial, x) -> int:
    if isinstance(x, float) and math.isinf(x):
        s = _sign(p.leading)
        if x < 0 and p.degree % 2 == 1:
            s = -s
        return s
    return _sign(p(x))


def _variations(chain: Sequence[RationalPolynomial], x) -> int:
    signs = [s for s in (_sign_at(q, x) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _as_bound(value, default: float):
    if value is None:
        return default
    if isinstance(value, float):
        if math.isinf(value):
            return value
        return Fraction(value)
    return to_rational(value)


def sturm_count_roots(
    p: RationalPolynomial,
    lo: Optional[Union[RationalLike, float]] = None,
    hi: Optional[Union[RationalLike, float]] = None,
) -> int:
    """
    Number of distinct real roots of p in the half-open interval (lo, hi].
    None (or an infinite float) stands for -inf / +inf.
    """
    if p.is_zero():
        raise PolynomialError("cannot count roots of the zero polynomial")
    a = _as_bound(lo, NEG_INF)
    b = _as_bound(hi, POS_INF)
    if not a < b:
        raise PolynomialError(f"empty interval ({lo}, {hi}]")
    chain = sturm_chain(p)
    count = _variations(chain, a) - _variations(chain, b)
    logger.debug("sturm: degree %d, chain length %d, %d roots in (%s, %s]", p.degree, len(chain), count, a, b)
    return count


def parse_polynomial(text: str) -> RationalPolynomial:
    """Parse "1,4,6,4" or "1,1/2" (constant coefficient first)."""
    parts = [s.strip() for s in text.split(",")]
    if not text.strip() or any(not s for s in parts):
        raise PolynomialParseError(f"Invalid polynomial text: {text!r}")
    try:
        return RationalPolynomial.from_coeffs(Fraction(s) for s in parts)
    except (ValueError, ZeroDivisionError) as e:
        raise PolynomialParseError(f"Invalid coefficient in {text!r}: {e}") from e


def format_polynomial(p: RationalPolynomial) -> str:
    if p.is_zero():
        return "0"
    return ",".join(format_rational(c) for c in p.coeffs)

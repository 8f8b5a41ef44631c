from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import Limits, Tolerances
from .exact_arith import (
    NonzeroRemainderError,
    RationalPolynomial,
    exact_divide,
    format_polynomial,
    format_rational,
    poly_gcd,
    sturm_count_roots,
    to_rational,
)
from .family_construction import (
    FamilyParams,
    closed_form_P,
    expected_real_roots,
    family_gammas,
)

logger = logging.getLogger(__name__)

# start points must not lie on the real axis or be conjugate-symmetric
_ANGLE_OFFSET = math.pi * (math.sqrt(5.0) - 1.0) / 2.0


class RootFindingError(RuntimeError):
    def __init__(self, message: str, residuals: Optional[List[float]] = None):
        super().__init__(message)
        self.residuals = residuals or []


class BracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class ComplexRoot:
    re: float
    im: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def as_dict(self) -> Dict[str, Any]:
        return {"re": self.re, "im": self.im}


@dataclass(frozen=True)
class Gammas:
    """Positive rationals gamma_i = beta_i + 1/2 of odd length 2k + 1."""
    values: tuple

    def __post_init__(self):
        vals = tuple(to_rational(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) % 2 != 1:
            raise ValueError(f"Gammas needs odd length, got {len(vals)}")
        for v in vals:
            if v <= 0:
                raise ValueError(f"Gammas entries must be positive, got {v}")

    @property
    def k(self) -> int:
        return (len(self.values) - 1) // 2

    @property
    def betas(self) -> List[Fraction]:
        return [g - Fraction(1, 2) for g in self.values]

    @property
    def alphas(self) -> List[Fraction]:
        return [-1 - b for b in self.betas]


@dataclass
class RootReport:
    roots: List[ComplexRoot]
    n_real: int
    n_imaginary: int
    all_imag_on_critical_line: bool
    real_roots_in_open_unit_interval: bool
    distinct: bool
    conjecture_band_ok: bool
    conjugate_pairs_ok: bool = True

    def as_dict(self) -> Dict[str, Any]:
        return {
            "roots": [r.as_dict() for r in self.roots],
            "n_real": self.n_real,
            "n_imaginary": self.n_imaginary,
            "all_imag_on_critical_line": self.all_imag_on_critical_line,
            "real_roots_in_open_unit_interval": self.real_roots_in_open_unit_interval,
            "distinct": self.distinct,
            "conjecture_band_ok": self.conjecture_band_ok,
            "conjugate_pairs_ok": self.conjugate_pairs_ok,
        }


@dataclass
class Certificate:
    """Outcome of the exact critical-line certification."""
    passed: bool
    step: Optional[str] = None   # failing step: division | odd_coefficients | root_at_zero | not_squarefree | even_part_count
    reason: str = ""
    H: Optional[RationalPolynomial] = None

    @property
    def n_critical_roots(self) -> int:
        if self.H is None or self.H.degree < 0:
            return 0
        return 2 * self.H.degree

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else f"FAIL({self.step})"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "step": self.step,
            "reason": self.reason,
            "H": None if self.H is None else format_polynomial(self.H),
        }


# -- numeric roots -----------------------------------------------------------

def _scaled_residuals(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    num = np.abs(npoly.polyval(z, coeffs))
    den = npoly.polyval(np.abs(z), np.abs(coeffs))
    return num / np.maximum(den, np.finfo(float).tiny)


def find_roots_numeric(
    p: RationalPolynomial,
    tolerances: Tolerances = Tolerances(),
    max_iterations: int = Limits().max_iterations,
    seed: int = 0,
) -> List[ComplexRoot]:
    """
    All deg(p) complex roots by Aberth iteration on the monic double image,
    started on a circle of radius 1 + max|c_i| with an irrational angle offset.
    One Newton polish step follows convergence.
    """
    deg = p.degree
    if deg < 1:
        raise RootFindingError(f"root finding needs degree >= 1, got {deg}")
    coeffs = np.array(p.monic().to_floats(), dtype=float)
    if deg == 1:
        return [ComplexRoot(float(-coeffs[0]), 0.0)]
    dcoeffs = npoly.polyder(coeffs)

    rng = np.random.default_rng(seed)
    radius = 1.0 + float(np.max(np.abs(coeffs[:-1])))
    theta = 2.0 * np.pi * np.arange(deg) / deg + _ANGLE_OFFSET + rng.uniform(0.0, 0.1)
    z = radius * np.exp(1j * theta)

    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        pz = npoly.polyval(z, coeffs)
        dpz = npoly.polyval(z, dcoeffs)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        bad = ~np.isfinite(step)
        if np.any(bad):
            step[bad] = 1e-3 * radius * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, bad.sum()))
        z = z - step
        if float(np.max(np.abs(step))) < tolerances.step:
            converged = True
            break

    # one Newton polish step, kept only where it lowers the residual
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = z - npoly.polyval(z, coeffs) / npoly.polyval(z, dcoeffs)
    before = _scaled_residuals(coeffs, z)
    after = _scaled_residuals(coeffs, polished)
    better = np.isfinite(polished) & (after < before)
    z = np.where(better, polished, z)

    residuals = _scaled_residuals(coeffs, z)
    if not np.all(np.isfinite(z)) or float(np.max(residuals)) > tolerances.residual:
        raise RootFindingError(
            f"Aberth iteration did not converge after {it} iterations (max residual {float(np.max(residuals)):.3e})",
            residuals.tolist(),
        )
    if not converged:
        logger.debug("find_roots_numeric: step criterion not met after %d iterations, residual %.3e accepted", it, float(np.max(residuals)))
    else:
        logger.debug("find_roots_numeric: degree %d converged in %d iterations", deg, it)
    order = np.lexsort((z.imag, z.real))
    return [ComplexRoot(float(z[i].real), float(z[i].imag)) for i in order]


# -- critical-line bisection --------------------------------------------------

def _argument_sum(gammas: Sequence[float], y: float) -> float:
    return sum(math.atan(y / g) for g in gammas)


def critical_line_roots_bisection(g: Gammas, tol: float = Tolerances().bisection) -> List[float]:
    """
    Solutions b of h(b) = pi/2 + m*pi, m = -k..k-1, where
    h(b) = sum arctan(b / gamma_i) is strictly increasing and odd.
    The imaginary roots of the gamma product polynomial are -1/2 +- b*i.
    """
    gammas = [float(v) for v in g.values]
    k = g.k
    out: List[float] = []
    for m in range(-k, k):
        target = math.pi / 2.0 + m * math.pi
        if target > 0:
            lo, hi = 0.0, 1.0
            while _argument_sum(gammas, hi) <= target:
                hi *= 2.0
                if hi > 1e300:
                    raise BracketError(f"no upper bracket for target {target}")
        else:
            lo, hi = -1.0, 0.0
            while _argument_sum(gammas, lo) >= target:
                lo *= 2.0
                if lo < -1e300:
                    raise BracketError(f"no lower bracket for target {target}")
        if not (_argument_sum(gammas, lo) < target < _argument_sum(gammas, hi)):
            raise BracketError(f"bracket [{lo}, {hi}] does not straddle target {target}")
        while hi - lo >= tol:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if _argument_sum(gammas, mid) < target:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return sorted(out)


def lemma2_polynomial(g: Gammas) -> RationalPolynomial:
    """f(x) = prod (x - alpha_i) - prod (x - beta_i), degree 2k."""
    first = RationalPolynomial.product(RationalPolynomial.linear_factor(a) for a in g.alphas)
    second = RationalPolynomial.product(RationalPolynomial.linear_factor(b) for b in g.betas)
    return first - second


def critical_line_roots_for_family(params: FamilyParams, tol: float = Tolerances().bisection) -> List[complex]:
    """Nonreal roots of the family's Ehrhart polynomial as -1/2 + b*i."""
    bs = critical_line_roots_bisection(Gammas(tuple(family_gammas(params))), tol)
    return [complex(-0.5, b) for b in bs]


# -- exact certification --------------------------------------------------------

def verify_critical_line_exact(p: RationalPolynomial, known_real_roots: Sequence[Fraction]) -> Certificate:
    """
    After dividing out the known real roots, substitute n = y - 1/2 to get G(y);
    PASS iff G(y) = H(y^2) with H square-free and all roots of H negative,
    i.e. every remaining root is -1/2 + b*i with b real and nonzero, pairwise distinct.
    """
    if p.is_zero():
        return Certificate(False, "division", "zero polynomial")
    q = p
    for r in known_real_roots:
        try:
            q = exact_divide(q, RationalPolynomial.linear_factor(r))
        except NonzeroRemainderError as e:
            return Certificate(False, "division", f"{format_rational(to_rational(r))} is not a root (remainder {e.remainder})")
    G = q.compose_linear(1, Fraction(-1, 2))
    odd = G.odd_coefficients()
    if odd:
        i, c = odd[0]
        return Certificate(False, "odd_coefficients", f"coefficient of y^{i} is {format_rational(c)} after the shift")
    H = G.even_part_in_square().primitive()
    if H.degree <= 0:
        return Certificate(True, None, "no roots left after removing the real roots", H)
    if H(0) == 0:
        return Certificate(False, "root_at_zero", "H(0) = 0: -1/2 is a repeated root", H)
    if poly_gcd(H, H.derivative()).degree > 0:
        return Certificate(False, "not_squarefree", "gcd(H, H') is not constant", H)
    negative = sturm_count_roots(H, None, 0)
    if negative != H.degree:
        return Certificate(
            False,
            "even_part_count",
            f"H has {negative} negative real roots, degree {H.degree}",
            H,
        )
    return Certificate(True, None, f"{2 * H.degree} distinct roots on Re = -1/2", H)


# -- classification ---------------------------------------------------------------

def conjecture_band_ok(roots: Sequence[ComplexRoot], d: int, tol: float = Tolerances().classify) -> bool:
    """-d <= Re(a) <= d - 1 for every root."""
    return all(-d - tol <= r.re <= d - 1 + tol for r in roots)


def classify_roots(roots: Sequence[ComplexRoot], d: int, tolerances: Tolerances = Tolerances()) -> RootReport:
    tol = tolerances.classify
    if len(roots) != d:
        raise ValueError(f"expected {d} roots, got {len(roots)}")
    real = [r for r in roots if abs(r.im) <= tol]
    imag = [r for r in roots if abs(r.im) > tol]
    on_line = all(abs(r.re + 0.5) <= tol for r in imag)
    in_interval = all(-1.0 + tol < r.re < -tol for r in real)
    values = [r.value for r in roots]
    distinct = all(
        abs(values[i] - values[j]) > tolerances.distinct
        for i in range(len(values))
        for j in range(i + 1, len(values))
    )
    conj_ok = all(
        any(abs(r.value.conjugate() - s.value) <= tolerances.conjugate for s in imag)
        for r in imag
    )
    return RootReport(
        roots=list(roots),
        n_real=len(real),
        n_imaginary=len(imag),
        all_imag_on_critical_line=on_line,
        real_roots_in_open_unit_interval=in_interval,
        distinct=distinct,
        conjecture_band_ok=conjecture_band_ok(roots, d, tol),
        conjugate_pairs_ok=conj_ok,
    )


# -- Theorem check --------------------------------------------------------------------

ITEMS = ("i", "ii", "iii", "iv", "v")


@dataclass
class TheoremReport:
    params: FamilyParams
    i_poly: RationalPolynomial
    report: Optional[RootReport]
    certificate: Optional[Certificate]
    items: Dict[str, bool] = field(default_factory=dict)
    numeric_items: Dict[str, bool] = field(default_factory=dict)
    expected_real_roots: List[Fraction] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    @property
    def numeric_agrees(self) -> Optional[bool]:
        if not self.numeric_items or self.certificate is None:
            return None
        return self.numeric_items == self.items

    @property
    def all_pass(self) -> bool:
        cert_ok = self.certificate is None or self.certificate.passed
        if self.certificate is not None and self.certificate.passed:
            # roots on Re = -1/2 and in (-1, 0) lie inside the band
            band_ok = True
        else:
            band_ok = self.report is None or self.report.conjecture_band_ok
        return bool(self.items) and all(self.items.values()) and cert_ok and band_ok

    def as_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.as_dict(),
            "ehrhart_polynomial": format_polynomial(self.i_poly),
            "expected_real_roots": [format_rational(r) for r in self.expected_real_roots],
            "roots": None if self.report is None else self.report.as_dict(),
            "items": {k: ("PASS" if v else "FAIL") for k, v in self.items.items()},
            "numeric_items": {k: ("PASS" if v else "FAIL") for k, v in self.numeric_items.items()},
            "numeric_agrees": self.numeric_agrees,
            "certificate": None if self.certificate is None else self.certificate.as_dict(),
            "skipped": list(self.skipped),
            "all_pass": self.all_pass,
        }


def _numeric_items(
    report: RootReport,
    params: FamilyParams,
    expected: Sequence[Fraction],
    tolerances: Tolerances,
) -> Dict[str, bool]:
    real = sorted((r.re for r in report.roots if abs(r.im) <= tolerances.classify), reverse=True)
    matches = len(real) == len(expected) and all(
        abs(x - float(e)) <= tolerances.classify for x, e in zip(real, expected)
    )
    return {
        "i": report.distinct and len(report.roots) == params.d,
        "ii": report.n_imaginary == 2 * params.k,
        "iii": report.n_real == params.d - 2 * params.k and matches,
        "iv": report.all_imag_on_critical_line,
        "v": report.real_roots_in_open_unit_interval,
    }


def theorem_property_check(
    params: FamilyParams,
    tolerances: Tolerances = Tolerances(),
    limits: Limits = Limits(),
    seed: int = 0,
) -> TheoremReport:
    """
    Items (i)-(v): d distinct roots, exactly 2k imaginary, exactly d - 2k real
    matching -i/(d-2k+1), imaginary roots on Re = -1/2, real roots in (-1, 0).

    When the exact certificate runs it decides every item; the double-precision
    classification is kept in numeric_items and only decides when d > max_d_exact.
    """
    d, k = params.d, params.k
    i_poly = closed_form_P(params)
    expected = expected_real_roots(params)
    out = TheoremReport(params=params, i_poly=i_poly, report=None, certificate=None, expected_real_roots=expected)

    if d <= limits.max_d_exact:
        cert = verify_critical_line_exact(i_poly, expected)
        out.certificate = cert
        # the divided-out roots are the distinct rationals -i/(d-2k+1) in (-1, 0);
        # a passing certificate puts the other 2 deg(H) distinct roots on the line
        ok = cert.passed and cert.n_critical_roots == 2 * k
        out.items = {item: ok for item in ITEMS}
    else:
        out.skipped.append(f"exact certificate (d={d} > {limits.max_d_exact})")

    if d > limits.max_d_numeric:
        out.skipped.append(f"numeric roots (d={d} > {limits.max_d_numeric})")
        return out

    try:
        roots = find_roots_numeric(i_poly, tolerances, limits.max_iterations, seed)
    except RootFindingError as e:
        if out.certificate is None:
            raise
        out.skipped.append(f"numeric roots ({e})")
        logger.warning("(k=%d, d=%d): %s; relying on the exact certificate", k, d, e)
        return out

    out.report = classify_roots(roots, d, tolerances)
    out.numeric_items = _numeric_items(out.report, params, expected, tolerances)
    if out.certificate is None:
        out.items = dict(out.numeric_items)
    elif not out.numeric_agrees:
        failed = sorted(name for name, v in out.numeric_items.items() if v != out.items[name])
        logger.warning(
            "(k=%d, d=%d): exact certificate %s disagrees with the numeric classification on items %s",
            k, d, out.certificate.verdict, ", ".join(failed),
        )
    return out

"""
Meromorphic continuation of the spectral zeta function and Laurent data of
Z(s) = Gamma(s) zeta_P(s) at its poles.

Polynomial spectra are reduced to Hurwitz zeta combinations
    zeta_P(s) = sum_j binom(-s, j) a^{-s-j} sum_i e_{j,i} zeta_H(g(s + j) - i, alpha0) + head(s)
after depressing the eigenvalue polynomial to a x^g + D(x) in x = n + alpha.
Exponential spectra are rational functions of w = rho q^{r s}.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src import config
from src.errors import (
    DepthInsufficient,
    DomainError,
    NotAPole,
    PoleAt,
    RadiusTooSmall,
    TolError,
    UnsupportedClass,
)
from src.series import (
    Poly,
    exp_linear_series,
    is_even_poly,
    poly_degree,
    poly_eval,
    poly_mul,
    poly_pow,
    poly_scale,
    poly_trim,
    series_mul,
    series_pow,
    taylor_shift,
)
from src.specfun import (
    binomial,
    eulerian_row,
    gamma,
    gamma_residue,
    gamma_taylor_at_zero,
    hurwitz_zeta,
    hurwitz_zeta_nonpositive,
)
from src.spectrum import (
    Exponential,
    Mode,
    Polynomial,
    SpectrumSpec,
    composite_a,
    drop_leading_modes,
    head_modes,
)

logger = logging.getLogger(__name__)


class ContinuationClass(str, Enum):
    LINEAR_A = "LinearA"
    EQUAL_ROOTS_A = "EqualRootsA"
    EVEN_POWER_A = "EvenPowerA"
    BINOMIAL_REDUCED = "BinomialReduced"
    EXPONENTIAL_Q = "ExponentialQ"


class Provenance(str, Enum):
    EXACT_RATIONAL = "ExactRational"
    EXACT_SPECIAL = "ExactSpecial"
    NUMERIC_CAUCHY = "NumericCauchy"


@dataclass(frozen=True)
class PoleDatum:
    """Pole of Z with principal part b_{-1}, ..., b_{-order}."""
    location: complex
    order: int
    principal: Tuple[complex, ...]
    provenance: Provenance
    exact: Optional[Tuple[Fraction, ...]] = None
    radius: Optional[float] = None
    points: Optional[int] = None
    err_est: float = 0.0


@dataclass(frozen=True)
class Region:
    r_max: float = config.DEFAULT_REGION_R
    y_max: float = config.DEFAULT_REGION_Y


def _is_nonpositive_integer(s: complex) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


def _head_zeta(head: Sequence[Mode], s: complex) -> complex:
    return sum(float(m) * cmath.exp(-s * math.log(float(l))) for l, m in head)


def _head_at_nonpositive(head: Sequence[Mode], n: int):
    return sum((m * l ** n for l, m in head), Fraction(0))


# ---------- Polynomial spectra ----------
class PolynomialForm:
    """Depressed reduction of a polynomial spectrum onto Hurwitz zeta values."""

    def __init__(self, a: Fraction, g: int, alpha0: Fraction, b_tilde: Poly, d_tilde: Poly,
                 head: Sequence[Mode], alpha_tilde: Fraction):
        self.a = a
        self.g = g
        self.alpha0 = alpha0
        self.alpha_tilde = alpha_tilde
        self.b_tilde = b_tilde
        self.d_tilde = d_tilde
        self.head = tuple(head)
        self.deg_b = poly_degree(b_tilde)
        self.deg_d = poly_degree(d_tilde)
        self._e: List[Poly] = [b_tilde]
        self._log_a = math.log(a)

    @property
    def beta(self) -> Fraction:
        return self.d_tilde[0] if self.deg_d <= 0 else Fraction(0)

    @property
    def reduced(self) -> bool:
        return self.deg_d < 0

    def e(self, j: int) -> Poly:
        if self.reduced and j > 0:
            return (Fraction(0),)
        while len(self._e) <= j:
            self._e.append(poly_mul(self._e[-1], self.d_tilde))
        return self._e[j]

    def depth_bound(self, depth: int) -> float:
        if self.reduced:
            return math.inf
        return ((depth + 1) * (self.g - self.deg_d) - 1 - self.deg_b) / self.g

    def depth_for(self, r_max: float) -> Optional[int]:
        if self.reduced:
            return None
        depth = 0
        while self.depth_bound(depth) < r_max:
            depth += 1
        return depth

    # zeta_P(s)
    def zeta(self, s: complex) -> complex:
        s = complex(s)
        if _is_nonpositive_integer(s):
            return complex(float(self.zeta_at_nonpositive(int(-s.real))))
        total = _head_zeta(self.head, s)
        small = 0
        for j in range(config.BINOMIAL_MAX_TERMS + 1):
            coeffs = self.e(j)
            if self.reduced and j > 0:
                break
            weight = binomial(-s, j) * cmath.exp(-(s + j) * self._log_a)
            inner = 0j
            for i, c in enumerate(coeffs):
                if c == 0:
                    continue
                try:
                    inner += float(c) * hurwitz_zeta(self.g * (s + j) - i, self.alpha0)
                except PoleAt:
                    raise PoleAt(s)
            term = weight * inner
            if not cmath.isfinite(term):
                raise TolError(f"binomial series at s = {s} has a non-finite term at j = {j}", field="s")
            total += term
            if j > 0 and abs(term) <= 1e-17 * max(abs(total), 1e-300):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
        else:
            raise TolError(f"binomial series at s = {s} did not settle within {config.BINOMIAL_MAX_TERMS} terms",
                           field="s")
        return total

    def zeta_at_nonpositive(self, n: int) -> Fraction:
        """Exact zeta_P(-n), including the entire head."""
        total = _head_at_nonpositive(self.head, n)
        for j in range(0, n + 1):
            weight = binomial(n, j) * self.a ** (n - j)
            for i, c in enumerate(self.e(j)):
                if c != 0:
                    total += weight * c * hurwitz_zeta_nonpositive(self.g * (n - j) + i, self.alpha0)
        if not self.reduced:
            j_max = (self.deg_b + 1 + self.g * n) // (self.g - self.deg_d)
            for j in range(n + 1, j_max + 1):
                i = self.g * (j - n) - 1
                coeffs = self.e(j)
                if i < 0 or i >= len(coeffs) or coeffs[i] == 0:
                    continue
                slope = Fraction(-1)
                for l in range(j):
                    if l != n:
                        slope *= (n - l)
                slope /= math.factorial(j)
                total += slope * self.a ** (n - j) * coeffs[i] / self.g
        return total

    def zeta_poles(self, r_max: float, depth: Optional[int]) -> Dict[Fraction, Fraction]:
        """s0 -> R with residue of zeta_P at s0 equal to a^{-s0} R."""
        out: Dict[Fraction, Fraction] = {}
        j = 0
        while True:
            if depth is not None and j > depth:
                break
            coeffs = self.e(j)
            top = Fraction(1 + max(len(coeffs) - 1, 0), self.g) - j
            if top <= -r_max or (self.reduced and j > 0):
                break
            for i, c in enumerate(coeffs):
                if c == 0:
                    continue
                s0 = Fraction(1 + i, self.g) - j
                if s0 <= -r_max or (s0 <= 0 and s0.denominator == 1):
                    continue
                contribution = binomial(-s0, j) * self.a ** (-j) * c / self.g
                out[s0] = out.get(s0, Fraction(0)) + contribution
            j += 1
        return {s0: r for s0, r in out.items() if r != 0}


def _depress(spec: SpectrumSpec) -> Tuple[Fraction, int, Fraction, Poly, Poly]:
    a_tilde = composite_a(spec)
    g = len(a_tilde) - 1
    a = a_tilde[-1]
    alpha = a_tilde[g - 1] / (g * a)
    shifted = taylor_shift(a_tilde, -alpha)
    d_tilde = poly_trim(shifted[: g - 1]) if g >= 2 else (Fraction(0),)
    b_tilde = taylor_shift(spec.kind.b_coeffs, -alpha)
    return a, g, alpha, b_tilde, d_tilde


def polynomial_form(spec: SpectrumSpec) -> Tuple[PolynomialForm, ContinuationClass]:
    """Reduce a polynomial spectrum and pick its continuation class."""
    a, g, alpha, b_tilde, d_tilde = _depress(spec)
    alpha_start = alpha + spec.n_start
    deg_d = poly_degree(d_tilde)

    if g == 1:
        tag = ContinuationClass.LINEAR_A
    elif deg_d < 0:
        tag = ContinuationClass.EQUAL_ROOTS_A
    else:
        tag = ContinuationClass.BINOMIAL_REDUCED
    alpha0 = alpha_start

    if g % 2 == 0 and deg_d <= 0 and is_even_poly(b_tilde) and (2 * alpha_start).denominator == 1 \
            and alpha_start > 0:
        shift = math.ceil(alpha_start) - 1
        alpha_tilde = alpha_start - shift
        if all(poly_eval(b_tilde, alpha_tilde + i) == 0 for i in range(shift)):
            tag = ContinuationClass.EVEN_POWER_A
            alpha0 = alpha_tilde
    alpha_tilde = alpha0

    lower = [(abs(d_tilde[k]) / a, g - k) for k in range(len(d_tilde)) if d_tilde[k] != 0] if deg_d >= 0 else []
    head: List[Mode] = list(head_modes(spec, positive_only=True))
    while alpha0 <= 0 or sum(float(u) * float(alpha0) ** (-e) for u, e in lower) > config.BINOMIAL_RHO:
        mult = poly_eval(b_tilde, alpha0)
        if mult != 0:
            lam = a * alpha0 ** g + poly_eval(d_tilde, alpha0)
            if lam <= 0:
                raise DomainError(f"folded mode at x = {alpha0} has eigenvalue {lam}", field="A")
            head.append((lam, mult))
        alpha0 += 1
    if alpha0 != alpha_tilde:
        logger.debug("folded %d modes into the entire head", int(alpha0 - alpha_tilde))
    return PolynomialForm(a, g, alpha0, b_tilde, d_tilde, head, alpha_tilde), tag


# ---------- Exponential spectra ----------
class ExponentialForm:
    """zeta_P(s) = c^{-s} w^{n0} p~(w) / (1 - w)^{m+1} + head(s), w = rho q^{r s}."""

    def __init__(self, spec: SpectrumSpec):
        kind = spec.kind
        self.c = spec.scale
        self.q = kind.q
        self.r = kind.power_r
        self.rho = kind.mult_ratio
        self.n0 = kind.n_start
        self.m = poly_degree(kind.p_coeffs)
        self.head = tuple(head_modes(spec, positive_only=True))
        self.log_step = float(self.r) * math.log(self.q)      # r log q < 0
        self.p_tilde = self._numerator(kind.p_coeffs)
        self.exact_powers = self.r.denominator == 1

    def _numerator(self, p: Poly) -> Poly:
        shifted = taylor_shift(p, self.n0)
        one_minus_w = (Fraction(1), Fraction(-1))
        total: Poly = (Fraction(0),)
        for j, pj in enumerate(shifted):
            if pj == 0:
                continue
            if j == 0:
                ej: Poly = (Fraction(1),)
            else:
                ej = poly_trim([Fraction(0)] + [Fraction(v) for v in eulerian_row(j)])
            piece = poly_mul(poly_scale(ej, pj), poly_pow(one_minus_w, self.m - j))
            total = poly_trim([(total[k] if k < len(total) else 0) + (piece[k] if k < len(piece) else 0)
                               for k in range(max(len(total), len(piece)))])
        return total

    @property
    def abscissa(self) -> float:
        return -math.log(self.rho) / self.log_step

    @property
    def spacing(self) -> float:
        return 2 * math.pi / abs(self.log_step)

    def zeta(self, s: complex) -> complex:
        s = complex(s)
        if _is_nonpositive_integer(s) and self.exact_powers:
            return complex(float(self.zeta_at_nonpositive(int(-s.real))))
        w = float(self.rho) * cmath.exp(s * self.log_step)
        if abs(1 - w) < 1e-15:
            raise PoleAt(s)
        value = cmath.exp(-s * math.log(self.c)) * w ** self.n0 * poly_eval([complex(c) for c in self.p_tilde], w) \
            / (1 - w) ** (self.m + 1)
        return value + _head_zeta(self.head, s)

    def zeta_at_nonpositive(self, n: int) -> Union[Fraction, float]:
        if not self.exact_powers:
            return self._float_at(n)
        w = self.rho * self.q ** (-int(self.r) * n)
        value = self.c ** n * w ** self.n0 * poly_eval(self.p_tilde, w) / (1 - w) ** (self.m + 1)
        return value + _head_at_nonpositive(self.head, n)

    def _float_at(self, n: int) -> float:
        w = float(self.rho) * math.exp(-n * self.log_step)
        value = float(self.c) ** n * w ** self.n0 * poly_eval([float(c) for c in self.p_tilde], w) \
            / (1 - w) ** (self.m + 1)
        return value + float(sum(float(m) * float(l) ** n for l, m in self.head))

    def pole_locations(self, y_max: float) -> List[complex]:
        k_max = int(math.floor(y_max / self.spacing))
        re = self.abscissa
        return [complex(re, -k * self.spacing) for k in range(-k_max, k_max + 1)]

    def laurent(self, s0: complex) -> PoleDatum:
        at_zero = abs(s0) < 1e-12
        order = self.m + 1 + (1 if at_zero else 0)
        size = order
        lstep = self.log_step
        series = np.zeros(size, dtype=complex)
        series[0] = cmath.exp(-s0 * math.log(self.c)) * (-lstep) ** (-(self.m + 1))
        series = series_mul(series, exp_linear_series(-math.log(self.c), size), size)
        series = series_mul(series, exp_linear_series(self.n0 * lstep, size), size)
        numer = np.zeros(size, dtype=complex)
        for k, pk in enumerate(self.p_tilde):
            if pk != 0:
                numer += float(pk) * exp_linear_series(k * lstep, size)
        series = series_mul(series, numer, size)
        e_series = np.array([lstep ** i / math.factorial(i + 1) for i in range(size)], dtype=complex)
        series = series_mul(series, series_pow(e_series, -(self.m + 1), size), size)

        provenance, err, radius, points = Provenance.EXACT_SPECIAL, 0.0, None, None
        if at_zero:
            g_series = gamma_taylor_at_zero(size)
        elif size == 1:
            g_series = np.array([gamma(s0)])
        else:
            dist = min(abs(s0 - k) for k in range(0, -int(abs(s0.real)) - 3, -1))
            radius = min(1.0, dist / 2)
            g_series, err = cauchy_coefficients(gamma, s0, radius, range(size), config.CAUCHY_POINTS)
            provenance, points = Provenance.NUMERIC_CAUCHY, config.CAUCHY_CHECK_POINTS
        series = series_mul(series, g_series, size)
        principal = [series[order - k] for k in range(1, order + 1)]
        if at_zero:
            principal[0] += float(sum(m for _, m in self.head))
        return PoleDatum(s0, order, tuple(complex(b) for b in principal), provenance,
                         radius=radius, points=points, err_est=err)


# ---------- Continuation data ----------
@dataclass(frozen=True)
class ContinuationData:
    class_tag: ContinuationClass
    form: Union[PolynomialForm, ExponentialForm]
    z_poles: Tuple[PoleDatum, ...]
    region: Region
    validity: float
    depth: Optional[int]
    finite_poles: bool
    cancelled: Tuple[int, ...]
    spec: SpectrumSpec
    truncated: Tuple[Mode, ...] = field(default_factory=tuple)

    @property
    def evaluator(self) -> Callable[[complex], complex]:
        return self.form.zeta

    def zeta(self, s: complex) -> complex:
        return self.form.zeta(s)

    def z(self, s: complex) -> complex:
        """Gamma(s) zeta_P(s)."""
        return gamma(s) * self.form.zeta(s)

    def zeta_at_nonpositive(self, n: int):
        return self.form.zeta_at_nonpositive(n)


def cauchy_coefficients(f: Callable[[complex], complex], z0: complex, radius: float,
                        orders: Sequence[int], points: int) -> Tuple[np.ndarray, float]:
    """
    Laurent/Taylor coefficients c_k of f around z0 by the trapezoid rule on a circle.
    Returns the coefficients and the change against a doubled point count.
    """
    def run(count: int) -> np.ndarray:
        theta = 2 * np.pi * np.arange(count) / count
        offsets = radius * np.exp(1j * theta)
        values = np.array([f(z0 + o) for o in offsets], dtype=complex)
        return np.array([np.mean(values * offsets ** (-k)) for k in orders], dtype=complex)

    coarse = run(points)
    fine = run(2 * points)
    err = float(np.max(np.abs(coarse - fine))) if len(coarse) else 0.0
    return fine, err


def _gamma_pole(n: int, value) -> PoleDatum:
    residue = gamma_residue(n) * value if isinstance(value, Fraction) else float(gamma_residue(n)) * value
    if isinstance(residue, Fraction):
        return PoleDatum(complex(-n, 0), 1, (complex(float(residue)),), Provenance.EXACT_RATIONAL,
                         exact=(residue,))
    return PoleDatum(complex(-n, 0), 1, (complex(residue),), Provenance.EXACT_SPECIAL)


def _polynomial_poles(form: PolynomialForm, region: Region, depth: Optional[int]) \
        -> Tuple[List[PoleDatum], List[int]]:
    poles: List[PoleDatum] = []
    for s0, rational in sorted(form.zeta_poles(region.r_max, depth).items(), reverse=True):
        if s0.denominator == 1 and s0 > 0:
            residue = Fraction(math.factorial(int(s0) - 1)) * form.a ** (-int(s0)) * rational
            poles.append(PoleDatum(complex(float(s0), 0), 1, (complex(float(residue)),),
                                   Provenance.EXACT_RATIONAL, exact=(residue,)))
        else:
            value = gamma(float(s0)) * math.exp(-float(s0) * math.log(form.a)) * float(rational)
            poles.append(PoleDatum(complex(float(s0), 0), 1, (complex(value),), Provenance.EXACT_SPECIAL))
    cancelled: List[int] = []
    n = 0
    while n < region.r_max:
        value = form.zeta_at_nonpositive(n)
        if value == 0:
            cancelled.append(n)
        else:
            poles.append(_gamma_pole(n, value))
        n += 1
    return poles, cancelled


def _exponential_poles(form: ExponentialForm, region: Region) -> Tuple[List[PoleDatum], List[int]]:
    poles: List[PoleDatum] = []
    if form.abscissa > -region.r_max:
        for s0 in form.pole_locations(region.y_max):
            poles.append(form.laurent(s0))
    cancelled: List[int] = []
    n = 1 if form.rho == 1 else 0
    while n < region.r_max:
        value = form.zeta_at_nonpositive(n)
        if isinstance(value, Fraction) and value == 0:
            cancelled.append(n)
        else:
            if not isinstance(value, Fraction) and abs(value) < config.CANCELLATION_THRESHOLD:
                logger.warning("zeta(-%d) = %.3g is numerically zero; pole kept", n, value)
            poles.append(_gamma_pole(n, value))
        n += 1
    return poles, cancelled


def _has_finite_gamma_poles(form) -> bool:
    return all(form.zeta_at_nonpositive(n) == 0 for n in range(1, config.DIVERGENCE_ORDERS + 1))


def continue_zeta(spec: SpectrumSpec, region: Optional[Region] = None,
                  depth: Optional[int] = None) -> ContinuationData:
    """
    Continue zeta_P across the region Re s > -r_max, |Im s| <= y_max.
    @param region: Region. Extent of the pole enumeration.
    @param depth: int. Binomial depth; derived from the region when omitted.
    """
    region = region or Region()
    kind = spec.kind
    if isinstance(kind, Polynomial):
        form, tag = polynomial_form(spec)
        needed = form.depth_for(region.r_max)
        if depth is not None and not form.reduced and form.depth_bound(depth) < region.r_max:
            raise DepthInsufficient(
                f"depth {depth} covers Re s > {-form.depth_bound(depth):.4g}; region needs {-region.r_max:.4g}",
                field="depth")
        use_depth = depth if depth is not None else needed
        poles, cancelled = _polynomial_poles(form, region, use_depth)
        validity = form.depth_bound(use_depth) if use_depth is not None else math.inf
        finite = form.reduced and _has_finite_gamma_poles(form)
        logger.info("%s continuation: %d poles, %d cancelled Gamma poles", tag.value, len(poles), len(cancelled))
        return ContinuationData(tag, form, tuple(poles), region, validity, use_depth, finite,
                                tuple(cancelled), spec)
    if isinstance(kind, Exponential):
        if spec.shift != 0:
            raise UnsupportedClass("exponential spectra with a shift have no closed continuation", field="shift")
        form = ExponentialForm(spec)
        poles, cancelled = _exponential_poles(form, region)
        return ContinuationData(ContinuationClass.EXPONENTIAL_Q, form, tuple(poles), region, math.inf, None,
                                False, tuple(cancelled), spec)
    raise UnsupportedClass("explicit spectra fall outside every continuation class", field="kind")


def truncated_zeta(spec: SpectrumSpec, count: int, region: Optional[Region] = None,
                   depth: Optional[int] = None) -> ContinuationData:
    """Continuation data after removing the first `count` modes (head modes first)."""
    if count < 0:
        raise DomainError("truncation count must be non-negative", field="N")
    reduced, removed = drop_leading_modes(spec, count)
    data = continue_zeta(reduced, region, depth)
    return replace(data, truncated=tuple(removed))


# ---------- Laurent data ----------
def _singular_candidates(data: ContinuationData, s0: complex) -> List[complex]:
    out = [p.location for p in data.z_poles]
    reach = int(abs(s0.real)) + 3
    out += [complex(-n, 0) for n in range(0, reach)]
    form = data.form
    if isinstance(form, PolynomialForm):
        lo = -reach * form.g
        out += [complex(k / form.g, 0) for k in range(lo, form.deg_b + 2 + form.g)]
    else:
        out += form.pole_locations(abs(s0.imag) + 2 * form.spacing)
    return out


def laurent_at(data: ContinuationData, s0: complex, order_hint: int = 1, method: str = "auto") -> PoleDatum:
    """
    Principal part of Z at s0: enumerated exact data, or a Cauchy circle when
    method="cauchy" or the point was not enumerated.
    """
    s0 = complex(s0)
    if method not in ("auto", "cauchy"):
        raise DomainError(f"Unknown Laurent method {method!r}", field="method")
    if method == "auto":
        for pole in data.z_poles:
            if abs(pole.location - s0) < config.POLE_MATCH:
                return pole
    distances = [abs(c - s0) for c in _singular_candidates(data, s0) if abs(c - s0) > config.POLE_MATCH]
    radius = min(0.5, min(distances) / 2) if distances else 0.5
    if radius < config.CAUCHY_MIN_RADIUS:
        raise RadiusTooSmall(f"nearest singularity is {2 * radius:.3g} away", field="s0")
    orders = list(range(-1, -(max(order_hint, 1) + 3), -1))
    coeffs, err = cauchy_coefficients(data.z, s0, radius, orders, config.CAUCHY_POINTS)
    scale = max(abs(data.z(s0 + radius)), 1.0)
    significant = [k for k in range(len(orders))
                   if abs(coeffs[k]) > 1e3 * err + config.CANCELLATION_THRESHOLD * scale * radius ** (k + 1)]
    if not significant:
        raise NotAPole(f"Z is regular at {s0}", field="s0")
    order = max(significant) + 1
    return PoleDatum(s0, order, tuple(complex(c) for c in coeffs[:order]), Provenance.NUMERIC_CAUCHY,
                     radius=radius, points=2 * config.CAUCHY_POINTS, err_est=err)


def zeta_at_negative_integer(data: ContinuationData, n: int):
    """zeta_P(-n); a Fraction wherever the class admits the exact path."""
    if n < 0:
        raise DomainError(f"zeta_at_negative_integer needs n >= 0, got {n}", field="n")
    return data.zeta_at_nonpositive(n)


def pole_table(data: ContinuationData) -> pd.DataFrame:
    rows = []
    for pole in data.z_poles:
        for k, b in enumerate(pole.principal, start=1):
            rows.append({
                "s0_re": pole.location.real,
                "s0_im": pole.location.imag,
                "order": pole.order,
                "k": k,
                "b_re": b.real,
                "b_im": b.imag,
                "exact": str(pole.exact[k - 1]) if pole.exact is not None else "",
                "provenance": pole.provenance.value,
                "err_est": pole.err_est,
            })
    return pd.DataFrame(rows)

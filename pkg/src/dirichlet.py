import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, special

from src import config
from src.errors import DomainError, NotTraceClass, OutsideHalfPlane, TolError
from src.series import poly_degree, poly_derivative, root_bound
from src.specfun import bernoulli_number, binomial
from src.spectrum import (
    Explicit,
    Exponential,
    Polynomial,
    SpectrumSpec,
    composite_a,
    first_positive_eigenvalue,
    head_modes,
    mode_block,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesMeta:
    abscissa_zeta: float
    heat_well_defined: bool
    method: str                      # "analytic" | "numeric_limsup"
    indices_used: Optional[int] = None
    exact: Optional[Fraction] = None


# ---------- Abscissa ----------
def index_growth_table(spec: SpectrumSpec, count: int) -> pd.DataFrame:
    """Per-index growth data: n, lambda_n, N(lambda_n), log N / log lambda."""
    lam, mult = mode_block(spec, spec.n_start, count)
    head_total = float(sum(m for _, m in spec.head))
    counts = np.cumsum(mult) + head_total
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lam > 1, np.log(counts) / np.log(lam), np.nan)
    return pd.DataFrame({
        "n": np.arange(spec.n_start, spec.n_start + lam.size),
        "lambda": lam,
        "count": counts,
        "ratio": ratio,
    })


def _numeric_abscissa(spec: SpectrumSpec) -> SeriesMeta:
    table = index_growth_table(spec, config.ABSCISSA_INDEX_COUNT)
    used = len(table)
    decade = table.iloc[used // 10:]
    ratios = decade["ratio"].dropna()
    if ratios.empty:
        raise DomainError("too few eigenvalues above 1 to estimate the abscissa", field="pairs")
    logger.info("numeric abscissa from %d indices", used)
    # a finite sum is a finite heat trace at every t > 0
    return SeriesMeta(float(ratios.max()), True, "numeric_limsup", indices_used=used)


def abscissa(spec: SpectrumSpec) -> SeriesMeta:
    """
    Convergence abscissa L of the spectral zeta function.
    @param spec: SpectrumSpec. Validated spectrum.
    """
    kind = spec.kind
    if isinstance(kind, Polynomial):
        exact = Fraction(poly_degree(kind.b_coeffs) + 1, poly_degree(kind.a_coeffs))
        return SeriesMeta(float(exact), True, "analytic", exact=exact)
    if isinstance(kind, Exponential):
        if kind.mult_ratio == 1:
            return SeriesMeta(0.0, True, "analytic", exact=Fraction(0))
        value = math.log(kind.mult_ratio) / (float(kind.power_r) * math.log(1 / float(kind.q)))
        return SeriesMeta(value, True, "analytic")
    if kind.tail is None:
        return _numeric_abscissa(spec)
    tail = kind.tail
    degree = poly_degree(kind.tail_mult)
    if tail.form == "power":
        exact = Fraction(degree + 1) / tail.exponent
        return SeriesMeta(float(exact), True, "analytic", exact=exact)
    if tail.form in ("geometric", "exp_power"):
        return SeriesMeta(0.0, True, "analytic", exact=Fraction(0))
    return SeriesMeta(math.inf, False, "analytic")


# ---------- Certified summation ----------
def _monotone_index(spec: SpectrumSpec) -> int:
    """Index from which successive term ratios no longer increase."""
    kind = spec.kind
    if isinstance(kind, Polynomial):
        a_tilde = composite_a(spec)
        bound = max(root_bound(kind.b_coeffs), root_bound(poly_derivative(poly_derivative(a_tilde))))
        start = kind.n_start
    elif isinstance(kind, Exponential):
        bound = root_bound(kind.p_coeffs)
        start = kind.n_start
    else:
        start = kind.n_start + len(kind.pairs)
        bound = root_bound(kind.tail_mult) if kind.tail is not None else -math.inf
        tail = kind.tail
        if tail is not None and tail.form == "exp_power" and tail.exponent < 1:
            p, k = float(tail.exponent), float(tail.rate)
            bound = max(bound, ((1 - p) / (k * p)) ** (1 / p))
    if not math.isfinite(bound):
        return start
    return max(start, int(math.ceil(bound)) + 1)


def _fsum_complex(parts: Sequence[np.ndarray]) -> complex:
    values = np.concatenate(parts) if parts else np.zeros(0)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return complex(math.fsum(values))


def _sum_until_certified(values_fn: Callable[[int, int], np.ndarray],
                         bound_fn: Callable[[int], Optional[float]],
                         start: int, stop: Optional[int], tol: float, label: str) -> complex:
    parts: List[np.ndarray] = []
    n, size = start, config.SUM_FIRST_CHUNK
    while True:
        count = size if stop is None else min(size, stop - n)
        if count <= 0:
            break
        parts.append(values_fn(n, count))
        n += count
        if stop is not None and n >= stop:
            break
        bound = bound_fn(n)
        if bound is not None and bound <= tol:
            break
        if n - start > config.SUM_MAX_TERMS:
            raise TolError(f"{label}: tolerance {tol:g} not reached within {config.SUM_MAX_TERMS} terms", field="tol")
        size = min(2 * size, config.SUM_CHUNK)
    return _fsum_complex(parts)


def _ratio_bound(log_terms: Callable[[int], Tuple[float, float]], n: int, n_mono: int) -> Optional[float]:
    if n < n_mono:
        return None
    l0, l1 = log_terms(n)
    if l0 == -math.inf:
        return 0.0
    r = math.exp(l1 - l0) if l1 > -math.inf else 0.0
    if r >= 1:
        return None
    return math.exp(l0) / (1 - r)


def _power_tail_integral(spec: SpectrumSpec, t: float, n: int) -> Optional[float]:
    # sum_{m >= n} M(m) exp(-t lambda_m) <= sum_i |m_i| int_{n-1}^inf x^i exp(-k x^p) dx
    kind = spec.kind
    tail = kind.tail
    p = float(tail.exponent)
    k = t * float(spec.scale) * float(tail.coeff)
    x0 = n - 1
    total = 0.0
    for i, m in enumerate(kind.tail_mult):
        if m == 0:
            continue
        if x0 <= 0 or x0 < (i / (k * p)) ** (1 / p):
            return None
        a = (i + 1) / p
        total += abs(float(m)) * k ** (-a) / p * special.gamma(a) * special.gammaincc(a, k * x0 ** p)
    return total * math.exp(-t * float(spec.scale) * float(spec.shift))


def _head_heat(spec: SpectrumSpec, t: float) -> float:
    return math.fsum(float(m) * math.exp(-t * float(l)) for l, m in spec.head)


def heat_trace_direct(spec: SpectrumSpec, t: float, tol: float = config.HEAT_TOL) -> float:
    """
    Heat trace sum_n M_n exp(-t lambda_n) with a certified tail bound.
    @param t: float. Time, t > 0.
    @param tol: float. Absolute bound on the neglected tail.
    """
    if not t > 0:
        raise DomainError(f"heat trace needs t > 0, got {t}", field="t")
    if not spec.is_finite and not abscissa(spec).heat_well_defined:
        raise NotTraceClass("heat trace diverges for every t > 0", field="spec")

    def values(n: int, count: int) -> np.ndarray:
        lam, mult = mode_block(spec, n, count)
        return mult * np.exp(-t * lam)

    def log_terms(n: int) -> Tuple[float, float]:
        lam, mult = mode_block(spec, n, 2)
        with np.errstate(divide="ignore"):
            logs = np.log(mult) - t * lam
        return float(logs[0]), float(logs[1])

    kind = spec.kind
    n_mono = _monotone_index(spec)
    stop = spec.n_start + len(kind.pairs) if spec.is_finite else None
    power_tail = isinstance(kind, Explicit) and kind.tail is not None and kind.tail.form == "power" \
        and kind.tail.exponent < 1

    def bound(n: int) -> Optional[float]:
        if power_tail:
            return _power_tail_integral(spec, t, n) if n >= n_mono else None
        return _ratio_bound(log_terms, n, n_mono)

    total = _sum_until_certified(values, bound, spec.n_start, stop, tol, "heat_trace_direct")
    return _head_heat(spec, t) + total.real


# ---------- Zeta ----------
def _em_power_tail(terms: Sequence[Tuple[complex, complex]], n: int) -> Tuple[complex, float]:
    """
    Euler-Maclaurin tail sum_{m >= n} sum_k C_k m^{mu_k}; returns (value, last correction).
    """
    coeffs = np.array([c for c, _ in terms], dtype=complex)
    mus = np.array([mu for _, mu in terms], dtype=complex)
    x = float(n)
    powers = np.exp(mus * math.log(x))
    value = complex(np.sum(-coeffs * powers * x / (mus + 1)) + 0.5 * np.sum(coeffs * powers))
    falling = mus.copy()
    last = 0.0
    for k in range(1, config.ZETA_EM_TERMS + 1):
        r = 2 * k - 1
        deriv = complex(np.sum(coeffs * falling * powers / x ** r))
        correction = float(bernoulli_number(2 * k)) / math.factorial(2 * k) * deriv
        value -= correction
        last = abs(correction)
        falling = falling * (mus - r) * (mus - r - 1)
    return value, last


def _binomial_terms(lead: float, degree: float, lower: Sequence[Tuple[float, float]],
                    mult: Sequence[float], s: complex, n: int) -> List[Tuple[complex, complex]]:
    """
    Monomials of m(x) (lead x^degree (1 + sum_d u_d x^{-e_d}))^{-s}, truncated in the binomial series.
    `lower` holds (u_d, e_d) pairs; `mult` the ascending multiplicity coefficients.
    """
    rho = sum(abs(u) * n ** (-e) for u, e in lower)
    out: List[Tuple[complex, complex]] = []
    base = cmath.exp(-s * math.log(lead))
    powers = {0.0: 1.0 + 0j}
    j = 0
    while True:
        weight = base * binomial(-s, j)
        for offset, c in powers.items():
            for i, m in enumerate(mult):
                if m != 0:
                    out.append((weight * c * m, i - degree * s - offset))
        j += 1
        if not lower or abs(binomial(-s, j)) * rho ** j < 1e-18 or j > config.BINOMIAL_MAX_TERMS:
            break
        nxt: dict = {}
        for offset, c in powers.items():
            for u, e in lower:
                nxt[offset + e] = nxt.get(offset + e, 0j) + c * u
        powers = nxt
    return out


def _polynomial_zeta_tail(spec: SpectrumSpec, s: complex, tol: float) -> complex:
    a_tilde = [float(c) for c in composite_a(spec)]
    g = len(a_tilde) - 1
    lead = a_tilde[-1]
    lower = [(a_tilde[g - d] / lead, float(d)) for d in range(1, g + 1) if a_tilde[g - d] != 0]
    mult = [float(c) for c in spec.kind.b_coeffs]
    return _em_zeta(spec, s, tol, lead, float(g), lower, mult, g)


def _power_zeta_tail(spec: SpectrumSpec, s: complex, tol: float) -> complex:
    tail = spec.kind.tail
    lead = float(spec.scale) * float(tail.coeff)
    p = float(tail.exponent)
    lower = [(float(spec.shift) / float(tail.coeff), p)] if spec.shift != 0 else []
    mult = [float(c) for c in spec.kind.tail_mult]
    return _em_zeta(spec, s, tol, lead, p, lower, mult, max(1, math.ceil(p)),
                    first=spec.n_start + len(spec.kind.pairs))


def _em_zeta(spec: SpectrumSpec, s: complex, tol: float, lead: float, degree: float,
             lower: Sequence[Tuple[float, float]], mult: Sequence[float], growth: int,
             first: Optional[int] = None) -> complex:
    first = spec.n_start if first is None else first
    n = max(first, config.ZETA_EM_MIN_HEAD, int(math.ceil(growth * abs(s))) + 1)
    while sum(abs(u) * n ** (-e) for u, e in lower) > config.ZETA_BINOMIAL_RHO:
        n *= 2
    for _ in range(6):
        lam, mul = mode_block(spec, spec.n_start, n - spec.n_start)
        head = _fsum_complex([mul * np.exp(-s * np.log(lam))])
        tail, last = _em_power_tail(_binomial_terms(lead, degree, lower, mult, s, n), n)
        if last <= tol:
            return head + tail
        n *= 2
    raise TolError(f"zeta_direct: Euler-Maclaurin tail did not reach {tol:g}", field="tol")


def zeta_direct(spec: SpectrumSpec, s: complex, tol: float = config.ZETA_TOL) -> complex:
    """
    sum_n M_n lambda_n^{-s} in its half-plane of convergence.
    @param s: complex. Re s must exceed the abscissa by ZETA_MARGIN.
    @param tol: float. Absolute tail tolerance.
    """
    s = complex(s)
    kind = spec.kind
    if not spec.is_finite:
        meta = abscissa(spec)
        if not s.real > meta.abscissa_zeta + config.ZETA_MARGIN:
            raise OutsideHalfPlane(
                f"zeta_direct needs Re s > {meta.abscissa_zeta:.6g} + {config.ZETA_MARGIN}", field="s")
    head = sum(float(m) * cmath.exp(-s * math.log(float(l))) for l, m in head_modes(spec, positive_only=True))

    if isinstance(kind, Polynomial):
        return head + _polynomial_zeta_tail(spec, s, tol)
    if isinstance(kind, Explicit) and kind.tail is not None and kind.tail.form == "power":
        return head + _power_zeta_tail(spec, s, tol)

    def values(n: int, count: int) -> np.ndarray:
        lam, mult = mode_block(spec, n, count)
        with np.errstate(divide="ignore"):
            return mult * np.exp(-s * np.log(lam))

    def log_terms(n: int) -> Tuple[float, float]:
        lam, mult = mode_block(spec, n, 2)
        with np.errstate(divide="ignore"):
            logs = np.log(mult) - s.real * np.log(lam)
        return float(logs[0]), float(logs[1])

    n_mono = _monotone_index(spec)
    stop = spec.n_start + len(kind.pairs) if spec.is_finite else None
    total = _sum_until_certified(values, lambda n: _ratio_bound(log_terms, n, n_mono),
                                 spec.n_start, stop, tol, "zeta_direct")
    return head + total


# ---------- Mellin ----------
def mellin_transform_direct(spec: SpectrumSpec, s: float) -> float:
    """
    Integral of h(t) t^{s-1} over (0, inf) by quadrature; equals Gamma(s) zeta(s).
    @param s: float. Real, above the abscissa.
    """
    if any(l == 0 for l, _ in spec.head):
        raise DomainError("Mellin transform diverges at large t with zero modes", field="head")
    meta = abscissa(spec)
    if not s > meta.abscissa_zeta:
        raise OutsideHalfPlane(f"Mellin transform needs s > {meta.abscissa_zeta:.6g}", field="s")
    lam0 = first_positive_eigenvalue(spec)
    t_max = max(1.0, -math.log(config.MELLIN_DECAY) / lam0)

    def near(u: float) -> float:
        return 2.0 * heat_trace_direct(spec, u * u) * u ** (2 * s - 1)

    def far(t: float) -> float:
        return heat_trace_direct(spec, t) * t ** (s - 1)

    first, _ = integrate.quad(near, 0.0, 1.0, epsabs=0.0, epsrel=config.MELLIN_EPSREL, limit=200)
    second, _ = integrate.quad(far, 1.0, t_max, epsabs=0.0, epsrel=config.MELLIN_EPSREL, limit=200)
    return first + second


def growth_table(spec: SpectrumSpec, alphas: Sequence[float], grid: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """
    t^alpha h(t) sampled on a grid, dyadic 2^-1 .. 2^-10 by default.
    @param alphas: list. Exponents; a bounded column points at the abscissa.
    """
    ts = list(grid) if grid is not None else [2.0 ** (-k) for k in range(1, 11)]
    rows = []
    for t in ts:
        h = heat_trace_direct(spec, t)
        row = {"t": t, "h": h}
        row.update({f"t^{alpha:g} h": t ** alpha * h for alpha in alphas})
        rows.append(row)
    return pd.DataFrame(rows)

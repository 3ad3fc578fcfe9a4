import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate
from sklearn.linear_model import LinearRegression

from src import config
from src.continuation import (
    ContinuationClass,
    ContinuationData,
    ExponentialForm,
    PoleDatum,
    Provenance,
    Region,
    continue_zeta,
)
from src.dirichlet import abscissa, heat_trace_direct
from src.errors import (
    DepthInsufficient,
    InsufficientData,
    NoContinuation,
    NonIntegrableLine,
    NotTraceClass,
    PoleAt,
    PoleOnLine,
    TolError,
    UnsupportedClass,
)
from src.series import poly_degree
from src.specfun import gamma_residue, log_gamma_abs, riemann_zeta, theta3, theta4
from src.spectrum import Mode, SpectrumSpec, drop_leading_modes

logger = logging.getLogger(__name__)


# ---------- Terms ----------
@dataclass(frozen=True)
class ExpansionTerm:
    """t^{-s0} sum_k c_k (log 1/t)^k."""
    s0: complex
    coefficients: Tuple[complex, ...]
    provenance: Provenance
    exact: Optional[Tuple[Fraction, ...]] = None

    @property
    def log_degree(self) -> int:
        return len(self.coefficients) - 1

    def value(self, t: float) -> complex:
        log_inv = -math.log(t)
        poly = sum(c * log_inv ** k for k, c in enumerate(self.coefficients))
        return cmath.exp(self.s0 * log_inv) * poly


def residue_term(pole: PoleDatum) -> ExpansionTerm:
    """Residue of Z(s) t^{-s} at a pole; c_k = b_{-(k+1)} / k!."""
    coeffs = tuple(b / math.factorial(k) for k, b in enumerate(pole.principal))
    exact = None
    if pole.exact is not None:
        exact = tuple(b / math.factorial(k) for k, b in enumerate(pole.exact))
    return ExpansionTerm(pole.location, coeffs, pole.provenance, exact)


# ---------- Strips ----------
@dataclass(frozen=True)
class StripPlan:
    """Lines Re s = -R_n; strip n lies between -R_n and -R_{n-1}."""
    lines: Tuple[float, ...]
    cuts: Tuple[Tuple[float, ...], ...]
    cells: Tuple[Tuple[Tuple[PoleDatum, ...], ...], ...]


def _distinct(values: Iterable[float], tol: float = 1e-9) -> List[float]:
    out: List[float] = []
    for v in sorted(values, reverse=True):
        if not out or abs(out[-1] - v) > tol:
            out.append(v)
    return out


def _lines(data: ContinuationData, num_strips: int) -> List[float]:
    reals = _distinct(p.location.real for p in data.z_poles)
    top = max(reals[0], abscissa(data.spec).abscissa_zeta) if reals else 0.0
    limit = min(data.region.r_max, data.validity) - config.LINE_POLE_GAP
    lines = [-(top + 0.5)]
    for upper, lower in zip(reals, reals[1:]):
        lines.append(-(upper + lower) / 2)
    if reals:
        lines.append(0.5 - reals[-1])
    while len(lines) < num_strips + 1 and lines[-1] + 1 < limit:
        lines.append(lines[-1] + 1)
    return [r for r in lines if r < limit]


def _cells(poles: Sequence[PoleDatum], spacing: Optional[float]) -> Tuple[Tuple[float, ...], Tuple[Tuple[PoleDatum, ...], ...]]:
    heights = sorted({round(abs(p.location.imag), 9) for p in poles})
    if spacing is not None:
        cuts = tuple(spacing * (k + 0.5) for k in range(len(heights) - 1))
    else:
        cuts = tuple((a + b) / 2 for a, b in zip(heights, heights[1:]))
    groups: List[List[PoleDatum]] = [[] for _ in range(len(cuts) + 1)]
    for p in poles:
        y = abs(p.location.imag)
        k = sum(1 for c in cuts if y > c)
        groups[k].append(p)
    ordered = tuple(tuple(sorted(g, key=lambda p: (abs(p.location.imag), p.location.imag))) for g in groups)
    return cuts, ordered


def plan_strips(data: ContinuationData, num_strips: int) -> StripPlan:
    """
    Choose pole-free lines and group the poles between them into y-cells.
    @param num_strips: int. Number of strips to the left of the abscissa.
    """
    lines = _lines(data, num_strips)
    if len(lines) < num_strips + 1:
        raise DepthInsufficient(
            f"only {len(lines) - 1} strips fit inside Re s > {-min(data.region.r_max, data.validity):.4g}",
            field="strips")
    lines = lines[: num_strips + 1]
    spacing = data.form.spacing if isinstance(data.form, ExponentialForm) else None
    cuts, cells = [], []
    for n in range(1, num_strips + 1):
        lo, hi = -lines[n], -lines[n - 1]
        inside = [p for p in data.z_poles if lo < p.location.real < hi]
        strip_cuts, strip_cells = _cells(inside, spacing)
        cuts.append(strip_cuts)
        cells.append(strip_cells)
    return StripPlan(tuple(lines), tuple(cuts), tuple(cells))


# ---------- Remainder bounds ----------
@dataclass(frozen=True)
class RemainderBound:
    """|Z(-R + iy)| <= C exp(-eps |y|) on the line, fitted or analytic."""
    r: float
    c: float
    eps: float
    fit_quality: float
    analytic: bool
    c_fit: float
    eps_fit: float

    def value(self, t: float) -> float:
        return self.c * t ** self.r / (self.eps * math.pi)


def _check_line(data: ContinuationData, r: float) -> None:
    for p in data.z_poles:
        if abs(p.location.real + r) < config.POLE_MATCH:
            raise PoleOnLine(f"pole {p.location} lies on Re s = {-r}", field="R")


def _log_abs_z(data: ContinuationData, r: float, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    keep_y, values = [], []
    for y in ys:
        s = complex(-r, y)
        try:
            zeta = abs(data.zeta(s))
        except TolError:
            logger.debug("skipping unsettled sample at %s", s)
            continue
        if zeta == 0:
            continue
        keep_y.append(y)
        values.append(log_gamma_abs(s) + math.log(zeta))
    return np.array(keep_y), np.array(values)


def _analytic_linear(data: ContinuationData, r: float) -> Optional[float]:
    form = data.form
    if data.class_tag != ContinuationClass.LINEAR_A or form.head or poly_degree(form.b_tilde) != 0:
        return None
    if form.alpha0 not in (Fraction(1), Fraction(1, 2)) or r <= 0 or r != round(r) or round(r) % 2:
        return None
    c = float(form.b_tilde[0]) * float(form.a) ** r * (2 * math.pi) ** (-r) * riemann_zeta(r + 1).real
    if form.alpha0 == Fraction(1, 2):
        c *= 1 + 2.0 ** (-r)
    return c


def _analytic_exponential(data: ContinuationData, r: float) -> Optional[float]:
    form = data.form
    if not isinstance(form, ExponentialForm) or r <= 0:
        return None
    big_w = float(form.rho) * math.exp(-r * form.log_step)
    if big_w <= 1:
        return None
    p_hat = sum(abs(float(c)) * big_w ** k for k, c in enumerate(form.p_tilde))
    zeta_bound = float(form.c) ** r * big_w ** form.n0 * p_hat / (big_w - 1) ** (form.m + 1)
    zeta_bound += sum(float(m) * float(l) ** r for l, m in form.head)
    gamma_bound = math.sqrt(2 * math.pi) * math.exp(1 + r) * r ** (-r - 0.5)
    return gamma_bound * zeta_bound


def fit_remainder_bound(data: ContinuationData, r: float) -> RemainderBound:
    """
    Fit |Z(-R + iy)| <= C exp(-eps |y|) from samples on the line.
    @param r: float. The line is Re s = -r.
    """
    _check_line(data, r)
    ys = np.geomspace(config.FIT_Y_MIN, config.FIT_Y_MAX, config.FIT_SAMPLES)
    y_fit, log_fit = _log_abs_z(data, r, ys)
    if y_fit.size < 4:
        raise InsufficientData(f"too few non-zero samples on Re s = {-r}", field="R")
    model = LinearRegression().fit(y_fit.reshape(-1, 1), log_fit)
    slope = float(model.coef_[0])
    quality = float(model.score(y_fit.reshape(-1, 1), log_fit))
    if slope >= 0:
        raise NonIntegrableLine(f"|Z| does not decay on Re s = {-r} (slope {slope:.3g})", field="R")

    y_small, log_small = _log_abs_z(data, r, np.array(config.FIT_SMALL_Y))
    all_y = np.concatenate([y_small, y_fit])
    all_log = np.concatenate([log_small, log_fit])
    eps_top = min(-slope, math.pi / 2)
    best = None
    for eps in eps_top * np.linspace(0.5, 1.0, config.FIT_EPS_GRID):
        log_c = float(np.max(all_log + eps * all_y))
        score = log_c - math.log(eps)
        if best is None or score < best[0]:
            best = (score, math.exp(log_c), float(eps))
    _, c_fit, eps_fit = best

    analytic = _analytic_linear(data, r)
    if analytic is None:
        analytic = _analytic_exponential(data, r)
        if analytic is not None:
            analytic = max(analytic, float(np.max(np.exp(all_log + math.pi / 2 * all_y))))
    if analytic is not None:
        need = np.exp(all_log + math.pi / 2 * all_y)
        if np.all(need <= analytic * (1 + config.FIT_SLACK)):
            return RemainderBound(r, analytic, math.pi / 2, quality, True, c_fit, eps_fit)
        logger.warning("analytic bound on Re s = %g is below the samples; using the fit", -r)
    return RemainderBound(r, c_fit, eps_fit, quality, False, c_fit, eps_fit)


def remainder_fr(data: ContinuationData, r: float, t: float, bound: Optional[RemainderBound] = None) -> float:
    """
    F_R(t) = (1 / 2 pi i) int_{Re s = -R} Z(s) t^{-s} ds by quadrature.
    """
    _check_line(data, r)
    bound = bound or fit_remainder_bound(data, r)
    if bound.eps <= 0:
        raise NonIntegrableLine(f"no decay on Re s = {-r}", field="R")
    log_t = math.log(t)
    y_end = math.log(max(bound.c, 1e-300) / (bound.eps * config.REMAINDER_TAIL)) / bound.eps
    y_end = min(max(y_end, 10.0), config.REMAINDER_Y_CAP)

    def integrand(y: float) -> float:
        s = complex(-r, y)
        return (data.z(s) * cmath.exp(-1j * y * log_t)).real

    edges = np.arange(0.0, y_end + 5.0, 5.0)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = integrate.quad(integrand, lo, hi, limit=200, epsabs=1e-16, epsrel=1e-11)
        total += piece
    return t ** r * total / math.pi


# ---------- Exactness radius ----------
@dataclass(frozen=True)
class RadiusEstimate:
    analytic: Optional[float]
    numeric: Optional[float]
    running_max: Optional[float]
    gap: Optional[float]


def analytic_radius(data: ContinuationData) -> Optional[float]:
    if data.class_tag == ContinuationClass.LINEAR_A:
        return 2 * math.pi / float(data.form.a)
    if data.class_tag == ContinuationClass.EXPONENTIAL_Q:
        return math.inf
    return None


def numeric_radius(bounds: Sequence[RemainderBound]) -> Tuple[float, float]:
    """
    limsup (C_R / eps_R)^{1/R} from fitted bounds, inverted into a radius.
    Returns (extrapolated, running maximum over the last half).
    """
    usable = [b for b in bounds if b.r >= 1]
    if len(usable) < config.MIN_RADIUS_BOUNDS:
        raise InsufficientData(f"need {config.MIN_RADIUS_BOUNDS} bounds with R >= 1, got {len(usable)}",
                               field="strips")
    r = np.array([b.r for b in usable])
    v = np.array([math.log(b.c_fit / b.eps_fit) / b.r for b in usable])
    running = float(np.max(v[len(v) // 2:]))

    decay = LinearRegression().fit(np.column_stack([np.log(r), 1 / r]), v)
    if decay.coef_[0] < -0.5:
        return math.inf, math.exp(-running)
    model = LinearRegression().fit(np.column_stack([1 / r, np.log(r) / r]), v)
    return math.exp(-float(model.intercept_)), math.exp(-running)


def exactness_radius(bounds: Sequence[RemainderBound], data: Optional[ContinuationData] = None) -> RadiusEstimate:
    analytic = analytic_radius(data) if data is not None else None
    try:
        numeric, running = numeric_radius(bounds)
    except InsufficientData:
        if analytic is None:
            raise
        numeric = running = None
    gap = None
    if analytic is not None and numeric is not None and math.isfinite(analytic) and math.isfinite(numeric):
        gap = abs(numeric - analytic) / analytic
    return RadiusEstimate(analytic, numeric, running, gap)


# ---------- Classification ----------
class ConvergenceKind(str, Enum):
    EXACT = "Exact"
    ALMOST_EXACT = "AlmostExact"
    ASYMPTOTIC_ONLY = "AsymptoticOnly"
    DIVERGENT = "Divergent"
    NO_CONTINUATION = "NoContinuation"


@dataclass(frozen=True)
class JacobiRemainder:
    """exp(-t beta) b0 sqrt(pi / (a t)) (theta(exp(-pi^2 / (a t))) - 1) / 2."""
    a: float
    b0: float
    beta: float
    half_shifted: bool

    def __call__(self, t: float) -> float:
        tau = self.a * t
        q = math.exp(-math.pi ** 2 / tau)
        if q == 0.0:
            return 0.0
        theta = theta4(q) if self.half_shifted else theta3(q)
        return math.exp(-t * self.beta) * self.b0 * 0.5 * math.sqrt(math.pi / tau) * (theta - 1.0)


@dataclass(frozen=True)
class NumericRemainder:
    """h(t) minus every main term the expansion carries."""
    expansion: "HeatExpansion"

    def __call__(self, t: float) -> float:
        return heat_trace_direct(self.expansion.spec, t) - evaluate_expansion(self.expansion, t)


@dataclass(frozen=True)
class Classification:
    kind: ConvergenceKind
    radius: Optional[float] = None
    absolute: bool = False
    remainder: Optional[object] = None
    heuristic: bool = False
    evidence: Dict[str, object] = field(default_factory=dict)


def gamma_coefficients(data: ContinuationData, orders: int) -> List:
    """d_p = (-1)^p / p! zeta_P(-p) for p = 1 .. orders."""
    out = []
    for p in range(1, orders + 1):
        value = data.zeta_at_nonpositive(p)
        out.append(gamma_residue(p) * value if isinstance(value, Fraction) else float(gamma_residue(p)) * value)
    return out


def divergence_signature(coeffs: Sequence) -> Tuple[bool, Dict[str, object]]:
    """Same-sign Gamma-pole coefficients with increasing successive ratios."""
    nonzero = [c for c in coeffs if c != 0]
    evidence: Dict[str, object] = {"coefficients": [float(c) for c in coeffs]}
    if len(nonzero) != len(coeffs) or len(coeffs) < 4:
        evidence["reason"] = "vanishing coefficients"
        return False, evidence
    same_sign = all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs)
    ratios = [abs(coeffs[i + 1] / coeffs[i]) for i in range(len(coeffs) - 1)]
    tail = ratios[len(ratios) // 2:]
    increasing = all(b > a for a, b in zip(tail, tail[1:]))
    evidence.update(same_sign=same_sign, ratios=[float(r) for r in ratios], ratios_increasing=increasing)
    for t in config.DIVERGENCE_SAMPLE_T:
        terms = [abs(float(c)) * t ** (p + 1) for p, c in enumerate(coeffs)]
        start = next((p + 1 for p in range(len(terms) - 1)
                      if all(terms[k + 1] > terms[k] for k in range(p, len(terms) - 1))), None)
        evidence[f"growth_from_p_at_t={t:g}"] = start
    return same_sign and increasing, evidence


def _jacobi(data: ContinuationData) -> Optional[JacobiRemainder]:
    form = data.form
    if form.g != 2 or poly_degree(form.b_tilde) != 0 or form.alpha_tilde not in (Fraction(1), Fraction(1, 2)):
        return None
    if data.truncated or form.head:
        return None
    return JacobiRemainder(float(form.a), float(form.b_tilde[0]), float(form.beta),
                           form.alpha_tilde == Fraction(1, 2))


def classify(spec: SpectrumSpec, expansion: Optional["HeatExpansion"] = None) -> Classification:
    """
    Convergence class of the small-t expansion.
    @param expansion: HeatExpansion. Supplies strip bounds for the numeric radius when given.
    """
    if expansion is not None:
        data = expansion.data
    else:
        try:
            data = continue_zeta(drop_leading_modes(spec, len(spec.head))[0],
                                 Region(config.DEFAULT_REGION_R, config.DEFAULT_REGION_Y))
        except UnsupportedClass as exc:
            return Classification(ConvergenceKind.NO_CONTINUATION, evidence={"reason": str(exc)})
    tag = data.class_tag
    evidence: Dict[str, object] = {"class": tag.value}

    if tag == ContinuationClass.LINEAR_A:
        return Classification(ConvergenceKind.EXACT, analytic_radius(data), True, evidence=evidence)
    if tag == ContinuationClass.EXPONENTIAL_Q:
        return Classification(ConvergenceKind.EXACT, math.inf, True, evidence=evidence)
    if tag == ContinuationClass.EVEN_POWER_A or data.finite_poles:
        remainder = _jacobi(data) if tag == ContinuationClass.EVEN_POWER_A else None
        if remainder is None and expansion is not None:
            remainder = NumericRemainder(expansion)
        if remainder is not None:
            evidence["remainder_at_1"] = float(remainder(1.0))
        return Classification(ConvergenceKind.ALMOST_EXACT, math.inf, False, remainder, evidence=evidence)

    divergent, signature = divergence_signature(gamma_coefficients(data, config.DIVERGENCE_ORDERS))
    evidence.update(signature)
    if divergent:
        return Classification(ConvergenceKind.DIVERGENT, None, False, heuristic=True, evidence=evidence)
    radius = None
    if expansion is not None:
        bounds = [s.bound for s in expansion.strips if s.bound is not None]
        try:
            numeric, _ = numeric_radius(bounds)
            radius = numeric if numeric > 0 else None
        except InsufficientData:
            radius = None
    return Classification(ConvergenceKind.ASYMPTOTIC_ONLY, radius, False, evidence=evidence)


# ---------- Expansion ----------
@dataclass(frozen=True)
class Strip:
    index: int
    r_lo: float
    r_hi: float
    cells: Tuple[Tuple[ExpansionTerm, ...], ...]
    bound: Optional[RemainderBound] = None

    @property
    def terms(self) -> Tuple[ExpansionTerm, ...]:
        return tuple(term for cell in self.cells for term in cell)

    def value(self, t: float, strict_grouping: bool = False) -> complex:
        if strict_grouping:
            return sum((sum((term.value(t) for term in cell), 0j) for cell in self.cells), 0j)
        ordered = sorted(self.terms, key=lambda term: (abs(term.s0.imag), term.s0.imag))
        return sum((term.value(t) for term in ordered), 0j)


@dataclass(frozen=True)
class HeatExpansion:
    spec: SpectrumSpec
    data: ContinuationData
    plan: StripPlan
    strips: Tuple[Strip, ...]
    truncation_head: Tuple[Mode, ...] = field(default_factory=tuple)
    classification: Optional[Classification] = None


def _growth_ok(data: ContinuationData) -> bool:
    # vertical growth of zeta_P on a line left of the origin stays below the Gamma decay
    r = 0.5 if not any(abs(p.location.real + 0.5) < config.LINE_POLE_GAP for p in data.z_poles) else 0.75
    try:
        low = abs(data.zeta(complex(-r, 10.0)))
        high = abs(data.zeta(complex(-r, 100.0)))
    except PoleAt:
        return True
    except TolError:
        return False
    if low == 0 or high == 0:
        return True
    return (math.log(high) - math.log(low)) / 90.0 < math.pi / 2 - config.GROWTH_MARGIN


def _continue_for_strips(spec: SpectrumSpec, num_strips: int, depth: Optional[int]) -> Tuple[ContinuationData, StripPlan]:
    r_max = float(num_strips + 2)
    while True:
        data = continue_zeta(spec, Region(r_max, config.DEFAULT_REGION_Y), depth)
        try:
            return data, plan_strips(data, num_strips)
        except DepthInsufficient:
            if data.validity < r_max or r_max > 64 * (num_strips + 2):
                raise
            r_max *= 2


def build_expansion(spec: SpectrumSpec, num_strips: int = config.DEFAULT_STRIPS,
                    depth: Optional[int] = None, with_bounds: bool = True) -> HeatExpansion:
    """
    Small-t expansion of the heat trace grouped into vertical strips.
    @param num_strips: int. Strips to the left of the abscissa.
    @param depth: int. Binomial depth for polynomial spectra.
    @param with_bounds: bool. Fit a remainder bound on every strip line.
    """
    if not abscissa(spec).heat_well_defined:
        raise NotTraceClass("heat trace diverges for every t > 0", field="spec")
    work, removed = drop_leading_modes(spec, len(spec.head))
    truncation = list(removed)
    try:
        data, plan = _continue_for_strips(work, num_strips, depth)
        while not _growth_ok(data) and len(truncation) - len(spec.head) < config.MAX_GROWTH_TRUNCATION:
            work, extra = drop_leading_modes(work, 1)
            truncation += extra
            data, plan = _continue_for_strips(work, num_strips, depth)
    except UnsupportedClass as exc:
        raise NoContinuation(str(exc), field=exc.field)
    if len(truncation) > len(spec.head):
        logger.info("truncated %d base modes to tame vertical growth", len(truncation) - len(spec.head))

    strips = []
    for n in range(1, num_strips + 1):
        bound = fit_remainder_bound(data, plan.lines[n]) if with_bounds else None
        cells = tuple(tuple(residue_term(p) for p in cell) for cell in plan.cells[n - 1])
        strips.append(Strip(n, plan.lines[n - 1], plan.lines[n], cells, bound))
    expansion = HeatExpansion(spec, data, plan, tuple(strips), tuple(truncation))
    return replace(expansion, classification=classify(spec, expansion))


def _head_value(expansion: HeatExpansion, t: float) -> float:
    return math.fsum(float(m) * math.exp(-t * float(l)) for l, m in expansion.truncation_head)


def partial_sums(expansion: HeatExpansion, t: float, strict_grouping: bool = False) -> np.ndarray:
    """Entry n holds the truncation head plus strips 1 .. n."""
    values = [complex(_head_value(expansion, t))]
    for strip in expansion.strips:
        values.append(values[-1] + strip.value(t, strict_grouping))
    return np.array(values, dtype=complex)


def evaluate_expansion(expansion: HeatExpansion, t: float, strips_used: Optional[int] = None,
                       strict_grouping: bool = False) -> float:
    sums = partial_sums(expansion, t, strict_grouping)
    n = len(expansion.strips) if strips_used is None else strips_used
    return float(sums[n].real)


def verification_table(expansion: HeatExpansion, ts: Sequence[float], tol: float = config.HEAT_TOL) -> pd.DataFrame:
    """Direct heat trace against every partial sum."""
    rows = []
    k = len(expansion.strips)
    for t in ts:
        direct = heat_trace_direct(expansion.spec, t, tol)
        sums = partial_sums(expansion, t).real
        row = {"t": t, "direct": direct}
        row.update({f"partial_{n}": float(sums[n]) for n in range(1, k + 1)})
        row.update({f"err_{n}": direct - float(sums[n]) for n in range(1, k + 1)})
        rows.append(row)
    return pd.DataFrame(rows)


def expansion_table(expansion: HeatExpansion) -> pd.DataFrame:
    rows = []
    for strip in expansion.strips:
        for term in strip.terms:
            for k, c in enumerate(term.coefficients):
                rows.append({
                    "strip": strip.index,
                    "s0_re": term.s0.real,
                    "s0_im": term.s0.imag,
                    "log_power": k,
                    "coeff_re": c.real,
                    "coeff_im": c.imag,
                    "provenance": term.provenance.value,
                    "exact": str(term.exact[k]) if term.exact is not None else "",
                })
    return pd.DataFrame(rows)


def divergence_evidence(data: ContinuationData, orders: int = config.DIVERGENCE_ORDERS) -> pd.DataFrame:
    """Gamma-pole coefficients d_p with their signs, successive ratios and sampled |d_p| t^p."""
    coeffs = gamma_coefficients(data, orders)
    rows = []
    for p, c in enumerate(coeffs, start=1):
        row = {"p": p, "d_p": float(c), "sign": (c > 0) - (c < 0)}
        row["ratio"] = abs(float(c / coeffs[p - 2])) if p > 1 and coeffs[p - 2] != 0 else float("nan")
        row.update({f"abs_d_p_t^p(t={t:g})": abs(float(c)) * t ** p for t in config.DIVERGENCE_SAMPLE_T})
        rows.append(row)
    return pd.DataFrame(rows)

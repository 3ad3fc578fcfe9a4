import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import special
from sklearn.linear_model import LinearRegression

from src import config
from src.dirichlet import abscissa, heat_trace_direct
from src.errors import NotTraceClass, TolError
from src.series import poly_degree
from src.spectrum import (
    Explicit,
    Exponential,
    Polynomial,
    SpectrumSpec,
    composite_a,
    counting_function,
    eigenvalue,
    last_index_below,
    tail_log_values,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlowlyVarying:
    """F(x) = coeff * (log x)^power; power 0 is a constant."""
    form: str                  # const | log_power | unknown
    coeff: float = 1.0
    power: float = 0.0
    method: str = "symbolic"   # symbolic | fitted

    def __call__(self, x: float) -> float:
        if self.power == 0:
            return self.coeff
        return self.coeff * math.log(x) ** self.power

    def describe(self) -> str:
        if self.form == "const" or self.power == 0:
            return f"{self.coeff:.6g}"
        base = "sqrt(log x)" if abs(self.power - 0.5) < 1e-12 else f"(log x)^{self.power:.6g}"
        text = base if abs(self.coeff - 1) < 1e-12 else f"{self.coeff:.6g}*{base}"
        return text if self.form != "unknown" else f"unknown (fit {text})"


@dataclass(frozen=True)
class TauberianReport:
    abscissa: float
    slowly_varying: SlowlyVarying
    slow_variation_ok: Optional[bool]
    ratio_samples: Tuple[Tuple[float, float], ...]
    skipped_times: Tuple[float, ...] = ()
    continuation_at_zero_expected: bool = True
    evidence: Dict[str, object] = field(default_factory=dict)

    def leading(self, t: float) -> float:
        """Gamma(L + 1) t^{-L} F(1/t)."""
        return special.gamma(self.abscissa + 1) * t ** (-self.abscissa) * self.slowly_varying(1 / t)

    def leading_text(self) -> str:
        f_text = self.slowly_varying.describe().replace("log x", "-log t")
        if self.abscissa == 0:
            return f_text
        return f"{special.gamma(self.abscissa + 1):.6g} * t^(-{self.abscissa:.6g}) * {f_text}"

    def to_record(self) -> dict:
        return {
            "L": self.abscissa,
            "F": self.slowly_varying.describe(),
            "F_method": self.slowly_varying.method,
            "leading": self.leading_text(),
            "slow_variation_ok": self.slow_variation_ok,
            "continuation_at_zero_expected": self.continuation_at_zero_expected,
            "ratio_samples": [{"t": t, "ratio": r} for t, r in self.ratio_samples],
            "skipped_times": list(self.skipped_times),
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class LacunaryReport:
    lacunary: bool
    method: str
    ratios: Tuple[float, ...] = ()

    def __bool__(self) -> bool:
        return self.lacunary


# ---------- Slowly varying part ----------
def _symbolic_f(spec: SpectrumSpec, big_l: float) -> Optional[SlowlyVarying]:
    kind = spec.kind
    if spec.is_finite:
        total = float(sum(m for _, m in kind.pairs) + sum(m for _, m in spec.head))
        return SlowlyVarying("const", total)
    if isinstance(kind, Polynomial):
        lead_a = float(composite_a(spec)[-1])
        d = poly_degree(kind.b_coeffs)
        return SlowlyVarying("const", float(kind.b_coeffs[-1]) / (d + 1) * lead_a ** (-big_l))
    if isinstance(kind, Exponential):
        if kind.mult_ratio != 1:
            return None
        m = poly_degree(kind.p_coeffs)
        k = float(kind.power_r) * math.log(1 / float(kind.q))
        return SlowlyVarying("log_power", float(kind.p_coeffs[-1]) / ((m + 1) * k ** (m + 1)), float(m + 1))
    tail = kind.tail
    d = poly_degree(kind.tail_mult)
    lead_m = float(kind.tail_mult[-1])
    if tail.form == "power":
        c = float(spec.scale) * float(tail.coeff)
        return SlowlyVarying("const", lead_m / (d + 1) * c ** (-big_l))
    if tail.form == "geometric":
        k = math.log(float(tail.exponent))
        return SlowlyVarying("log_power", lead_m / ((d + 1) * k ** (d + 1)), float(d + 1))
    if tail.form == "exp_power":
        power = (d + 1) / float(tail.exponent)
        return SlowlyVarying("log_power", lead_m / (d + 1) * float(tail.rate) ** (-power), power)
    return None


def _sample_lambdas(spec: SpectrumSpec) -> np.ndarray:
    start = spec.n_start + 4
    span = 60 if isinstance(spec.kind, Exponential) or (
        isinstance(spec.kind, Explicit) and spec.kind.tail is not None and spec.kind.tail.form == "geometric") \
        else 100000
    lo = max(float(eigenvalue(spec, start)), math.e ** 2)
    hi = float(eigenvalue(spec, start + span))
    return np.exp(np.linspace(math.log(lo), math.log(hi), 16))


def _fitted_f(spec: SpectrumSpec, big_l: float) -> Tuple[SlowlyVarying, bool, Dict[str, object]]:
    lams = _sample_lambdas(spec)
    counts = np.array([float(counting_function(spec, lam).count) for lam in lams])
    y = np.log(counts) - big_l * np.log(lams)
    x = np.log(np.log(lams)).reshape(-1, 1)
    model = LinearRegression().fit(x, y)
    power, coeff = float(model.coef_[0]), math.exp(float(model.intercept_))

    deviations = []
    for lam in lams[-4:]:
        base = float(counting_function(spec, lam).count) / lam ** big_l
        for factor in config.SLOW_VARIATION_FACTORS:
            moved = float(counting_function(spec, factor * lam).count) / (factor * lam) ** big_l
            deviations.append(abs(moved / base - 1))
    ok = bool(max(deviations) < config.SLOW_VARIATION_TOL)
    evidence = {"fit_power": power, "fit_coeff": coeff, "fit_r2": float(model.score(x, y)),
                "max_slow_variation_deviation": max(deviations)}
    form = "log_power" if ok else "unknown"
    if ok and abs(power) < 1e-2:
        form, power = "const", 0.0
    return SlowlyVarying(form, coeff, power, method="fitted"), ok, evidence


def _ratio_samples(spec: SpectrumSpec, report_l: float, sv: SlowlyVarying) -> Tuple[List[Tuple[float, float]], List[float]]:
    samples, skipped = [], []
    gamma_l = special.gamma(report_l + 1)
    for t in config.TAUBERIAN_TIMES:
        if not spec.is_finite and last_index_below(spec, 40.0 / t) - spec.n_start > config.SUM_MAX_TERMS:
            skipped.append(t)
            continue
        try:
            h = heat_trace_direct(spec, t)
        except TolError:
            skipped.append(t)
            continue
        leading = gamma_l * t ** (-report_l) * sv(1 / t)
        if leading > 0 and math.isfinite(h / leading):
            samples.append((t, h / leading))
        else:
            skipped.append(t)
    if skipped:
        logger.info("skipped direct summation at t = %s", skipped)
    return samples, skipped


def leading_order(spec: SpectrumSpec) -> TauberianReport:
    """
    Leading small-t behaviour Gamma(L + 1) t^{-L} F(1/t) from the counting function.
    @param spec: SpectrumSpec. Spectrum with a well-defined heat trace.
    """
    if spec.is_finite:
        big_l, method = 0.0, "finite"
    else:
        meta = abscissa(spec)
        if not meta.heat_well_defined:
            raise NotTraceClass("heat trace diverges for every t > 0", field="spec")
        big_l, method = meta.abscissa_zeta, meta.method
    evidence: Dict[str, object] = {"abscissa_method": method}
    sv = _symbolic_f(spec, big_l)
    ok: Optional[bool] = True
    if sv is None:
        sv, ok, fit = _fitted_f(spec, big_l)
        evidence.update(fit)
    samples, skipped = _ratio_samples(spec, big_l, sv)
    integral_power = float(sv.power).is_integer()
    return TauberianReport(big_l, sv, ok, tuple(samples), tuple(skipped), integral_power, evidence)


# ---------- Lacunary ----------
def _log_eigenvalues(spec: SpectrumSpec, indices: np.ndarray) -> np.ndarray:
    kind = spec.kind
    if isinstance(kind, Explicit) and kind.tail is not None:
        first_tail = spec.n_start + len(kind.pairs)
        if indices[0] >= first_tail:
            return math.log(float(spec.scale)) + tail_log_values(kind.tail, indices)
    return np.array([math.log(float(eigenvalue(spec, int(n)))) for n in indices])


def classify_lacunary(spec: SpectrumSpec) -> LacunaryReport:
    """True when lambda_{n+1} / lambda_n grows without bound."""
    kind = spec.kind
    if spec.is_finite:
        return LacunaryReport(False, "finite")
    tail = kind.tail if isinstance(kind, Explicit) else None
    start = spec.n_start + (len(kind.pairs) if isinstance(kind, Explicit) else 0) + 1
    indices = np.arange(start, start + config.LACUNARY_SAMPLES + 1)
    logs = _log_eigenvalues(spec, indices)
    with np.errstate(over="ignore"):
        ratios = tuple(float(v) for v in np.exp(np.diff(logs)))

    if isinstance(kind, (Polynomial, Exponential)):
        return LacunaryReport(False, "symbolic", ratios)
    # exp(k n^p) with p > 1: lambda_{n+1} / lambda_n = exp(k ((n+1)^p - n^p)) diverges
    return LacunaryReport(tail.form == "exp_power" and tail.exponent > 1, "symbolic", ratios)

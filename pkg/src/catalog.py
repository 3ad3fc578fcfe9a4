import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.errors import MalformedSpec, UnknownName
from src.series import Poly, poly_mul, poly_scale
from src.specfun import theta3
from src.spectrum import (
    SpectrumSpec,
    as_fraction,
    explicit_spectrum,
    exponential_spectrum,
    polynomial_spectrum,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Expected:
    classification: str
    radius: Optional[float] = None
    closed_form_heat: Optional[Callable[[float], float]] = None
    closed_form_text: str = ""
    source: str = ""


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: SpectrumSpec
    description: str
    expected: Optional[Expected] = None

    def to_record(self) -> dict:
        expected = self.expected
        return {
            "name": self.name,
            "description": self.description,
            "expected": None if expected is None else {
                "classification": expected.classification,
                "T": expected.radius,
                "closed_form_heat": expected.closed_form_text or None,
                "source": expected.source,
            },
        }


# ---------- Spheres ----------
def sphere_multiplicity(d: int) -> Poly:
    """2^{floor(d/2)+1} binom(n + d - 1, d - 1) as a polynomial in n."""
    poly: Poly = (Fraction(1),)
    for i in range(1, d):
        poly = poly_mul(poly, (Fraction(i), Fraction(1)))
    return poly_scale(poly, Fraction(2 ** (d // 2 + 1), math.factorial(d - 1)))


def _check_dimension(d: int) -> int:
    if d < 1:
        raise MalformedSpec(f"sphere dimension must be at least 1, got {d}", field="d")
    return d


def sphere_abs_d(d: int = 1) -> CatalogEntry:
    d = _check_dimension(int(d))
    spec = polynomial_spectrum([Fraction(d, 2), 1], sphere_multiplicity(d))
    closed = None
    if d == 1:
        closed = lambda t: 1.0 / math.sinh(t / 2)
    return CatalogEntry(
        f"sphere_absD:{d}", spec, f"|D| on the round {d}-sphere: lambda = n + {d}/2",
        Expected("Exact", 2 * math.pi, closed, "1/sinh(t/2)" if d == 1 else "", "exact on (0, 2 pi)"),
    )


def sphere_d_pow(d: int = 2, power: int = 2) -> CatalogEntry:
    d, power = _check_dimension(int(d)), int(power)
    if power < 2 or power % 2:
        raise MalformedSpec(f"sphere_Dpow needs an even power >= 2, got {power}", field="k")
    shift = (Fraction(d, 2), Fraction(1))
    a: Poly = (Fraction(1),)
    for _ in range(power):
        a = poly_mul(a, shift)
    spec = polynomial_spectrum(a, sphere_multiplicity(d))
    kind = "Divergent" if d % 2 == 0 else "AlmostExact"
    return CatalogEntry(
        f"sphere_Dpow:{d},{power}", spec, f"D^{power} on the round {d}-sphere: lambda = (n + {d}/2)^{power}",
        Expected(kind, None if kind == "Divergent" else math.inf,
                 source="only asymptotic" if kind == "Divergent" else "finite pole set"),
    )


# ---------- Circle ----------
def circle_trivial_spin() -> CatalogEntry:
    spec = polynomial_spectrum([0, 1], [2], n_start=1, head=[(0, 1)])
    return CatalogEntry(
        "circle_trivial_spin", spec, "|D| on the circle, trivial spin structure: 0 once, n >= 1 twice",
        Expected("Exact", 2 * math.pi, lambda t: 1.0 / math.tanh(t / 2), "coth(t/2)", "geometric series"),
    )


def circle_nontrivial_spin() -> CatalogEntry:
    spec = polynomial_spectrum([Fraction(1, 2), 1], [2])
    return CatalogEntry(
        "circle_nontrivial_spin", spec, "|D| on the circle, non-trivial spin structure: n + 1/2 twice",
        Expected("Exact", 2 * math.pi, lambda t: 1.0 / math.sinh(t / 2), "1/sinh(t/2)", "geometric series"),
    )


def theta_operator() -> CatalogEntry:
    spec = polynomial_spectrum([0, 0, 1], [1], n_start=1, head=[(0, 1)])
    return CatalogEntry(
        "theta_operator", spec, "lambda = n^2 for n >= 0; the zero mode sits in the head",
        Expected("AlmostExact", math.inf, lambda t: 0.5 * (theta3(math.exp(-t)) + 1.0),
                 "(theta3(exp(-t)) + 1)/2", "Jacobi inversion"),
    )


# ---------- Exponential ----------
def q_exponential(q="1/2", *p) -> CatalogEntry:
    coeffs = list(p) or [1]
    spec = exponential_spectrum(q, coeffs)
    return CatalogEntry(
        f"q_exponential:{q}," + ",".join(str(c) for c in coeffs), spec,
        f"lambda = q^-n with q = {q}, multiplicity polynomial {coeffs}",
        Expected("Exact", math.inf, source="absolutely exact for all t > 0"),
    )


def pow2_pow2() -> CatalogEntry:
    spec = exponential_spectrum("1/2", [1], mult_ratio=2)
    return CatalogEntry("pow2_pow2", spec, "lambda = 2^n with multiplicity 2^n",
                        Expected("Exact", math.inf, source="absolutely exact; F not slowly varying"))


# ---------- No continuation ----------
def lacunary_gauss() -> CatalogEntry:
    spec = explicit_spectrum(tail="exp(n^2)")
    return CatalogEntry("lacunary_gauss", spec, "lambda = exp(n^2); heat trace ~ sqrt(-log t)",
                        Expected("NoContinuation", source="lacunary"))


def subexp_n23() -> CatalogEntry:
    spec = explicit_spectrum(tail="exp(n^(2/3))")
    return CatalogEntry("subexp_n23", spec, "lambda = exp(n^(2/3)); N ~ (log lambda)^(3/2)",
                        Expected("NoContinuation", source="non-integral log power"))


def log_spectrum() -> CatalogEntry:
    spec = explicit_spectrum(tail="log(n)", n_start=2)
    return CatalogEntry("log_spectrum", spec, "lambda = log n for n >= 2; zeta only, no heat trace",
                        Expected("NoContinuation", source="explicit spectrum"))


# ---------- Further polynomial examples ----------
def linear_n() -> CatalogEntry:
    spec = polynomial_spectrum([0, 1], [1], n_start=1)
    return CatalogEntry("linear_n", spec, "lambda = n for n >= 1",
                        Expected("Exact", 2 * math.pi, lambda t: 1.0 / math.expm1(t), "1/(e^t - 1)",
                                 "geometric series"))


def half_square() -> CatalogEntry:
    spec = polynomial_spectrum([Fraction(1, 4), 1, 1], [1])
    return CatalogEntry("half_square", spec, "lambda = (n + 1/2)^2 for n >= 0",
                        Expected("AlmostExact", math.inf, source="finite pole set"))


def cubic_n2() -> CatalogEntry:
    spec = polynomial_spectrum([1, 0, 0, 1], [0, 0, 1], n_start=1)
    return CatalogEntry("cubic_n2", spec, "lambda = n^3 + 1 with multiplicity n^2, n >= 1")


def shifted_square(alpha=1) -> CatalogEntry:
    a = as_fraction(alpha, "alpha")
    spec = polynomial_spectrum([0, a, 1], [1], n_start=1)
    return CatalogEntry(f"shifted_square:{a}", spec, f"lambda = n (n + {a}) for n >= 1")


_CATALOG: Dict[str, Callable[..., CatalogEntry]] = {
    "sphere_absD": sphere_abs_d,
    "sphere_Dpow": sphere_d_pow,
    "circle_trivial_spin": circle_trivial_spin,
    "circle_nontrivial_spin": circle_nontrivial_spin,
    "theta_operator": theta_operator,
    "q_exponential": q_exponential,
    "pow2_pow2": pow2_pow2,
    "lacunary_gauss": lacunary_gauss,
    "subexp_n23": subexp_n23,
    "linear_n": linear_n,
    "half_square": half_square,
    "cubic_n2": cubic_n2,
    "shifted_square": shifted_square,
    "log_spectrum": log_spectrum,
}

_NAME = re.compile(r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(?::(?P<colon>.*)|\((?P<paren>.*)\))?\s*$")


def parse_name(text: str) -> Tuple[str, List[str]]:
    """'sphere_Dpow:2,2' and 'sphere_Dpow(2, 2)' both give ('sphere_Dpow', ['2', '2'])."""
    m = _NAME.match(str(text))
    if not m:
        raise UnknownName(f"cannot parse catalog name {text!r}", field="name")
    raw = m.group("colon") if m.group("colon") is not None else m.group("paren")
    params = [p.strip() for p in raw.split(",") if p.strip()] if raw else []
    return m.group("name"), params


def _convert(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def catalog_entry(name: str) -> CatalogEntry:
    """
    Build a named example spectrum.
    @param name: str. Entry name, optionally with parameters.
    """
    key, params = parse_name(name)
    builder = _CATALOG.get(key)
    if builder is None:
        raise UnknownName(f"Unknown catalog entry {key!r}", field="name")
    try:
        return builder(*[_convert(p) for p in params])
    except TypeError:
        raise UnknownName(f"{key}: wrong number of parameters {params}", field="name")


def catalog_names() -> Sequence[str]:
    return list(_CATALOG)


def list_catalog() -> pd.DataFrame:
    rows = []
    for key in _CATALOG:
        entry = catalog_entry(key)
        rows.append({
            "name": key,
            "example": entry.name,
            "description": entry.description,
            "expected": entry.expected.classification if entry.expected else "",
        })
    return pd.DataFrame(rows)

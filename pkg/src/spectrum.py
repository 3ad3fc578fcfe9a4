import logging
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as npoly

from src import config
from src.errors import (
    DomainError,
    MalformedSpec,
    NonIncreasingEigenvalues,
    NonPositiveEigenvalue,
    RootInIndexSet,
)
from src.series import (
    Poly,
    float_roots,
    poly_add,
    poly_degree,
    poly_derivative,
    poly_eval,
    poly_scale,
    poly_trim,
    power_sum,
)

logger = logging.getLogger(__name__)

Mode = Tuple[Union[Fraction, float], Union[Fraction, float]]


# ---------- Types ----------
@dataclass(frozen=True)
class Polynomial:
    """lambda_n = A(n), M_n = B(n) for n >= n_start."""
    a_coeffs: Poly
    b_coeffs: Poly
    n_start: int = 0


@dataclass(frozen=True)
class Exponential:
    """lambda_n = q^{-r n}, M_n = p(n) * mult_ratio^n for n >= n_start."""
    q: Fraction
    p_coeffs: Poly
    power_r: Fraction = Fraction(1)
    n_start: int = 0
    mult_ratio: Fraction = Fraction(1)


@dataclass(frozen=True)
class TailDescriptor:
    form: str                     # power | geometric | exp_power | log
    coeff: Fraction = Fraction(1)
    exponent: Fraction = Fraction(1)
    rate: Fraction = Fraction(1)
    text: str = ""


@dataclass(frozen=True)
class Explicit:
    pairs: Tuple[Tuple[Fraction, Fraction], ...]
    tail: Optional[TailDescriptor] = None
    tail_mult: Poly = (Fraction(1),)
    n_start: int = 0


Kind = Union[Polynomial, Exponential, Explicit]


@dataclass(frozen=True)
class SpectrumSpec:
    """
    Composite spectrum: lambda_n = scale * (base_n + shift), preceded by
    the finite `head` modes (lambda >= 0) which zeta sums skip when lambda = 0.
    """
    kind: Kind
    scale: Fraction = Fraction(1)
    shift: Fraction = Fraction(0)
    head: Tuple[Tuple[Fraction, Fraction], ...] = field(default_factory=tuple)

    @property
    def n_start(self) -> int:
        return self.kind.n_start

    @property
    def is_finite(self) -> bool:
        return isinstance(self.kind, Explicit) and self.kind.tail is None


# ---------- Number parsing ----------
def as_fraction(value, name: str) -> Fraction:
    if isinstance(value, bool) or value is None:
        raise MalformedSpec(f"{name}: expected a number, got {value!r}", field=name)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedSpec(f"{name}: cannot parse {value!r} as a rational number", field=name)


def _as_poly(values, name: str) -> Poly:
    if not isinstance(values, (list, tuple)) or len(values) == 0:
        raise MalformedSpec(f"{name}: expected a non-empty coefficient list", field=name)
    return poly_trim([as_fraction(v, f"{name}[{i}]") for i, v in enumerate(values)])


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise MalformedSpec(f"{name}: expected an integer, got {value!r}", field=name)
    try:
        return int(value)
    except ValueError:
        raise MalformedSpec(f"{name}: expected an integer, got {value!r}", field=name)


# ---------- Tail grammar ----------
_NUM = r"[0-9]+(?:\.[0-9]+)?(?:/[0-9]+)?"
_TAIL_PATTERNS = [
    ("power", re.compile(rf"^(?:(?P<c>{_NUM})\*)?n(?:\^\(?(?P<p>{_NUM})\)?)?$")),
    ("geometric", re.compile(rf"^(?:(?P<c>{_NUM})\*)?(?P<b>{_NUM})\^n$")),
    ("exp_power", re.compile(rf"^(?:(?P<c>{_NUM})\*)?exp\((?:(?P<k>{_NUM})\*)?n(?:\^\(?(?P<p>{_NUM})\)?)?\)$")),
    ("log", re.compile(rf"^(?:(?P<c>{_NUM})\*)?log\(n\)$")),
]


def parse_tail(text: str) -> TailDescriptor:
    """
    Parse a closed-form tail: [c*]n, [c*]n^p, [c*]b^n, [c*]exp([k*]n^p), [c*]log(n).
    @param text: str. Tail expression in the index n.
    """
    compact = re.sub(r"\s+", "", str(text))
    for form, pattern in _TAIL_PATTERNS:
        m = pattern.match(compact)
        if not m:
            continue
        groups = m.groupdict()
        coeff = Fraction(groups["c"]) if groups.get("c") else Fraction(1)
        if form == "geometric":
            base = Fraction(groups["b"])
            if base <= 1:
                raise MalformedSpec(f"tail: geometric base must exceed 1, got {base}", field="tail")
            return TailDescriptor(form, coeff, base, Fraction(1), text)
        exponent = Fraction(groups["p"]) if groups.get("p") else Fraction(1)
        rate = Fraction(groups["k"]) if groups.get("k") else Fraction(1)
        if exponent <= 0 or rate <= 0 or coeff <= 0:
            raise MalformedSpec(f"tail: parameters must be positive in {text!r}", field="tail")
        return TailDescriptor(form, coeff, exponent, rate, text)
    raise MalformedSpec(f"tail: unrecognised expression {text!r}", field="tail")


def _tail_value(tail: TailDescriptor, n: int):
    if tail.form == "power":
        if tail.exponent.denominator == 1:
            return tail.coeff * Fraction(n) ** int(tail.exponent)
        return float(tail.coeff) * float(n) ** float(tail.exponent)
    if tail.form == "geometric":
        return tail.coeff * tail.exponent ** n
    if tail.form == "exp_power":
        try:
            return float(tail.coeff) * math.exp(float(tail.rate) * float(n) ** float(tail.exponent))
        except OverflowError:
            return math.inf
    return float(tail.coeff) * math.log(n)


def tail_log_values(tail: TailDescriptor, n: np.ndarray) -> np.ndarray:
    """log of the tail eigenvalues; finite where the values themselves overflow."""
    n = np.asarray(n, dtype=float)
    c = math.log(float(tail.coeff))
    with np.errstate(divide="ignore", invalid="ignore"):
        if tail.form == "power":
            return c + float(tail.exponent) * np.log(n)
        if tail.form == "geometric":
            return c + n * math.log(float(tail.exponent))
        if tail.form == "exp_power":
            return c + float(tail.rate) * n ** float(tail.exponent)
        return c + np.log(np.log(n))


# ---------- Schema ----------
_COMMON_KEYS = {"kind", "n_start", "scale", "shift", "head", "name", "description"}
_KIND_KEYS = {
    "polynomial": {"A", "B"},
    "exponential": {"q", "p", "r", "mult_ratio"},
    "explicit": {"pairs", "tail", "tail_mult"},
}


def _parse_modes(values, name: str) -> Tuple[Tuple[Fraction, Fraction], ...]:
    if not isinstance(values, (list, tuple)):
        raise MalformedSpec(f"{name}: expected a list of [lambda, multiplicity] pairs", field=name)
    modes = []
    for i, pair in enumerate(values):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise MalformedSpec(f"{name}[{i}]: expected [lambda, multiplicity]", field=name)
        modes.append((as_fraction(pair[0], f"{name}[{i}][0]"), as_fraction(pair[1], f"{name}[{i}][1]")))
    return tuple(modes)


def make_spectrum(raw: Mapping) -> SpectrumSpec:
    """
    Build and validate a spectrum from its structured (JSON) form.
    An exponential spectrum may carry a shift. Direct sums accept it, but it has
    no meromorphic continuation here, so classification reports NoContinuation.
    @param raw: Mapping. Parsed spec document with a `kind` key.
    """
    if not isinstance(raw, Mapping):
        raise MalformedSpec("spec document must be an object", field="kind")
    kind_name = str(raw.get("kind", "")).lower()
    if kind_name not in _KIND_KEYS:
        raise MalformedSpec(f"kind: expected one of {sorted(_KIND_KEYS)}, got {raw.get('kind')!r}", field="kind")
    unknown = set(raw) - _COMMON_KEYS - _KIND_KEYS[kind_name]
    if unknown:
        key = sorted(unknown)[0]
        raise MalformedSpec(f"{key}: unknown key for kind {kind_name}", field=key)

    n_start = _as_int(raw.get("n_start", 0), "n_start")
    if n_start < 0:
        raise MalformedSpec("n_start: must be non-negative", field="n_start")

    if kind_name == "polynomial":
        for key in ("A", "B"):
            if key not in raw:
                raise MalformedSpec(f"{key}: required for polynomial spectra", field=key)
        kind: Kind = Polynomial(_as_poly(raw["A"], "A"), _as_poly(raw["B"], "B"), n_start)
    elif kind_name == "exponential":
        if "q" not in raw:
            raise MalformedSpec("q: required for exponential spectra", field="q")
        kind = Exponential(
            q=as_fraction(raw["q"], "q"),
            p_coeffs=_as_poly(raw.get("p", [1]), "p"),
            power_r=as_fraction(raw.get("r", 1), "r"),
            n_start=n_start,
            mult_ratio=as_fraction(raw.get("mult_ratio", 1), "mult_ratio"),
        )
    else:
        tail = parse_tail(raw["tail"]) if raw.get("tail") not in (None, "") else None
        kind = Explicit(
            pairs=_parse_modes(raw.get("pairs", []), "pairs"),
            tail=tail,
            tail_mult=_as_poly(raw.get("tail_mult", [1]), "tail_mult"),
            n_start=n_start,
        )

    spec = SpectrumSpec(
        kind=kind,
        scale=as_fraction(raw.get("scale", 1), "scale"),
        shift=as_fraction(raw.get("shift", 0), "shift"),
        head=_parse_modes(raw.get("head", []), "head"),
    )
    return validate_spectrum(spec)


def describe_spectrum(spec: SpectrumSpec) -> dict:
    """Inverse of make_spectrum; rationals rendered as strings."""
    kind = spec.kind
    out: dict = {}
    if isinstance(kind, Polynomial):
        out.update(kind="polynomial", A=[str(c) for c in kind.a_coeffs], B=[str(c) for c in kind.b_coeffs])
    elif isinstance(kind, Exponential):
        out.update(kind="exponential", q=str(kind.q), p=[str(c) for c in kind.p_coeffs],
                   r=str(kind.power_r), mult_ratio=str(kind.mult_ratio))
    else:
        out.update(kind="explicit", pairs=[[str(l), str(m)] for l, m in kind.pairs])
        if kind.tail is not None:
            out.update(tail=kind.tail.text, tail_mult=[str(c) for c in kind.tail_mult])
    out.update(n_start=kind.n_start, scale=str(spec.scale), shift=str(spec.shift),
               head=[[str(l), str(m)] for l, m in spec.head])
    return out


# ---------- Convenience constructors ----------
def polynomial_spectrum(a, b, n_start: int = 0, scale=1, shift=0, head=()) -> SpectrumSpec:
    spec = SpectrumSpec(
        kind=Polynomial(_as_poly(list(a), "A"), _as_poly(list(b), "B"), n_start),
        scale=as_fraction(scale, "scale"),
        shift=as_fraction(shift, "shift"),
        head=_parse_modes(list(head), "head"),
    )
    return validate_spectrum(spec)


def exponential_spectrum(q, p=(1,), r=1, n_start: int = 0, mult_ratio=1, scale=1, head=()) -> SpectrumSpec:
    spec = SpectrumSpec(
        kind=Exponential(as_fraction(q, "q"), _as_poly(list(p), "p"), as_fraction(r, "r"), n_start,
                         as_fraction(mult_ratio, "mult_ratio")),
        scale=as_fraction(scale, "scale"),
        head=_parse_modes(list(head), "head"),
    )
    return validate_spectrum(spec)


def explicit_spectrum(pairs=(), tail: Optional[str] = None, tail_mult=(1,), n_start: int = 0,
                      scale=1, shift=0, head=()) -> SpectrumSpec:
    spec = SpectrumSpec(
        kind=Explicit(_parse_modes(list(pairs), "pairs"), parse_tail(tail) if tail else None,
                      _as_poly(list(tail_mult), "tail_mult"), n_start),
        scale=as_fraction(scale, "scale"),
        shift=as_fraction(shift, "shift"),
        head=_parse_modes(list(head), "head"),
    )
    return validate_spectrum(spec)


# ---------- Composite polynomial ----------
def composite_a(spec: SpectrumSpec) -> Poly:
    """Eigenvalue polynomial scale * (A + shift) of a polynomial spectrum."""
    if not isinstance(spec.kind, Polynomial):
        raise DomainError("composite_a needs a polynomial spectrum", field="kind")
    return poly_scale(poly_add(spec.kind.a_coeffs, (spec.shift,)), spec.scale)


# ---------- Pointwise access ----------
def _base_value(kind: Kind, n: int):
    if isinstance(kind, Polynomial):
        return poly_eval(kind.a_coeffs, Fraction(n))
    if isinstance(kind, Exponential):
        if kind.power_r.denominator == 1:
            return kind.q ** (-int(kind.power_r) * n)
        return float(kind.q) ** (-float(kind.power_r) * n)
    i = n - kind.n_start
    if i < len(kind.pairs):
        return kind.pairs[i][0]
    if kind.tail is None:
        raise DomainError(f"index {n} is beyond the finite spectrum", field="n")
    return _tail_value(kind.tail, n)


def eigenvalue(spec: SpectrumSpec, n: int):
    """
    Base eigenvalue at absolute index n; exact Fraction where representable.
    @param n: int. Absolute index, n >= n_start.
    """
    if n < spec.n_start:
        raise DomainError(f"index {n} is below n_start = {spec.n_start}", field="n")
    base = _base_value(spec.kind, n)
    if isinstance(base, float):
        return float(spec.scale) * (base + float(spec.shift))
    return spec.scale * (base + spec.shift)


def multiplicity(spec: SpectrumSpec, n: int):
    if n < spec.n_start:
        raise DomainError(f"index {n} is below n_start = {spec.n_start}", field="n")
    kind = spec.kind
    if isinstance(kind, Polynomial):
        return poly_eval(kind.b_coeffs, Fraction(n))
    if isinstance(kind, Exponential):
        return poly_eval(kind.p_coeffs, Fraction(n)) * kind.mult_ratio ** n
    i = n - kind.n_start
    if i < len(kind.pairs):
        return kind.pairs[i][1]
    if kind.tail is None:
        raise DomainError(f"index {n} is beyond the finite spectrum", field="n")
    return poly_eval(kind.tail_mult, Fraction(n))


def base_length(spec: SpectrumSpec) -> Optional[int]:
    """Number of base modes, None when infinite."""
    if spec.is_finite:
        return len(spec.kind.pairs)
    return None


# ---------- Vectorised access ----------
def mode_block(spec: SpectrumSpec, start: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Float eigenvalues and multiplicities for base indices start .. start + count - 1.
    Eigenvalues that overflow come back as inf; finite spectra give shorter arrays.
    """
    kind = spec.kind
    n = np.arange(start, start + count, dtype=float)
    scale, shift = float(spec.scale), float(spec.shift)
    with np.errstate(over="ignore"):
        if isinstance(kind, Polynomial):
            base = npoly.polyval(n, [float(c) for c in kind.a_coeffs])
            mult = npoly.polyval(n, [float(c) for c in kind.b_coeffs])
        elif isinstance(kind, Exponential):
            base = np.exp(-float(kind.power_r) * n * math.log(float(kind.q)))
            mult = npoly.polyval(n, [float(c) for c in kind.p_coeffs]) * np.exp(n * math.log(float(kind.mult_ratio)))
        else:
            offset = start - kind.n_start
            n_pairs = len(kind.pairs)
            lo, hi = max(offset, 0), min(offset + count, n_pairs)
            pair_lam = np.array([float(l) for l, _ in kind.pairs[lo:hi]], dtype=float)
            pair_mult = np.array([float(m) for _, m in kind.pairs[lo:hi]], dtype=float)
            if kind.tail is None:
                base, mult = pair_lam, pair_mult
            else:
                tail_n = n[n - kind.n_start >= n_pairs]
                base = np.concatenate([pair_lam, np.exp(tail_log_values(kind.tail, tail_n))])
                mult = np.concatenate([pair_mult, npoly.polyval(tail_n, [float(c) for c in kind.tail_mult])])
        lam = scale * (base + shift)
    return lam, mult


def head_modes(spec: SpectrumSpec, positive_only: bool = False) -> List[Mode]:
    return [(l, m) for l, m in spec.head if not (positive_only and l == 0)]


def spectrum_table(spec: SpectrumSpec, count: int) -> pd.DataFrame:
    """Head modes followed by the first `count` base modes."""
    rows = [{"index": "head", "lambda": float(l), "M": float(m)} for l, m in spec.head]
    lam, mult = mode_block(spec, spec.n_start, count)
    rows += [{"index": spec.n_start + i, "lambda": float(l), "M": float(m)} for i, (l, m) in enumerate(zip(lam, mult))]
    return pd.DataFrame(rows, columns=["index", "lambda", "M"])


# ---------- Validation ----------
def _check_head(spec: SpectrumSpec) -> None:
    previous = None
    for lam, mult in spec.head:
        if lam < 0:
            raise NonPositiveEigenvalue(f"head: eigenvalue {lam} is negative", field="head")
        if mult <= 0:
            raise MalformedSpec(f"head: multiplicity {mult} must be positive", field="head")
        if previous is not None and lam <= previous:
            raise NonIncreasingEigenvalues("head: eigenvalues must increase", field="head")
        previous = lam
    if spec.head:
        first = eigenvalue(spec, spec.n_start) if base_length(spec) != 0 else None
        if first is not None and spec.head[-1][0] >= first:
            raise NonIncreasingEigenvalues("head: eigenvalues must lie below the base spectrum", field="head")


def _check_eventual_positive(p: Poly, beyond: int, name: str, error) -> None:
    if p[-1] <= 0:
        raise error(f"{name}: leading coefficient must be positive", field=name)
    roots = float_roots(p)
    real = roots[np.abs(roots.imag) < 1e-9].real
    if np.any(real > beyond):
        raise error(f"{name}: sign change beyond the validated prefix", field=name)


def _check_prefix(spec: SpectrumSpec) -> None:
    start = spec.n_start
    lam, mult = mode_block(spec, start, config.VALIDATION_PREFIX)
    finite = np.isfinite(lam)
    bad = np.nonzero(finite & (lam <= 0))[0]
    if bad.size:
        raise NonPositiveEigenvalue(f"eigenvalue at n = {start + bad[0]} is not positive", field="A")
    bad = np.nonzero(mult <= 0)[0]
    if bad.size:
        raise MalformedSpec(f"multiplicity at n = {start + bad[0]} is not positive", field="B")
    # overflowed entries compare as nan and are skipped; the tail forms are monotone
    with np.errstate(invalid="ignore"):
        steps = np.diff(lam)
    bad = np.nonzero(~(steps > 0) & ~np.isnan(steps))[0]
    if bad.size:
        raise NonIncreasingEigenvalues(f"eigenvalues do not increase at n = {start + bad[0] + 1}", field="A")


def _check_pairs(spec: SpectrumSpec) -> None:
    pairs = spec.kind.pairs
    if not pairs:
        return
    lam = np.array([float(l) for l, _ in pairs])
    mult = np.array([float(m) for _, m in pairs])
    lam = float(spec.scale) * (lam + float(spec.shift))
    if np.any(lam <= 0):
        raise NonPositiveEigenvalue("pairs: eigenvalues must be positive", field="pairs")
    if np.any(mult <= 0):
        raise MalformedSpec("pairs: multiplicities must be positive", field="pairs")
    if np.any(np.diff(lam) <= 0):
        raise NonIncreasingEigenvalues("pairs: eigenvalues must increase", field="pairs")


def _check_roots(spec: SpectrumSpec, a_tilde: Poly) -> None:
    for root in float_roots(a_tilde):
        if abs(root.imag) > 1e-7 or root.real < spec.n_start - 0.5:
            continue
        for k in {math.floor(root.real), math.ceil(root.real)}:
            if k >= spec.n_start and poly_eval(a_tilde, Fraction(k)) == 0:
                raise RootInIndexSet(f"eigenvalue polynomial vanishes at n = {k}", field="A")


def validate_spectrum(spec: SpectrumSpec) -> SpectrumSpec:
    """Validate in place; returns the spec unchanged or raises."""
    if spec.scale <= 0:
        raise MalformedSpec("scale: must be positive", field="scale")
    kind = spec.kind
    beyond = spec.n_start + config.VALIDATION_PREFIX
    if isinstance(kind, Polynomial):
        if poly_degree(kind.a_coeffs) < 1:
            raise MalformedSpec("A: degree must be at least 1", field="A")
        if poly_degree(kind.b_coeffs) < 0:
            raise MalformedSpec("B: multiplicity polynomial is zero", field="B")
        a_tilde = composite_a(spec)
        if a_tilde[-1] <= 0:
            raise NonIncreasingEigenvalues("A: leading coefficient must be positive", field="A")
        _check_roots(spec, a_tilde)
        _check_eventual_positive(kind.b_coeffs, beyond, "B", MalformedSpec)
        roots = float_roots(poly_derivative(a_tilde))
        real = roots[np.abs(roots.imag) < 1e-9].real
        if np.any(real > beyond):
            raise NonIncreasingEigenvalues("A: eigenvalues decrease beyond the validated prefix", field="A")
    elif isinstance(kind, Exponential):
        if not 0 < kind.q < 1:
            raise MalformedSpec("q: must satisfy 0 < q < 1", field="q")
        if kind.power_r <= 0:
            raise MalformedSpec("r: must be positive", field="r")
        if kind.mult_ratio < 1:
            raise MalformedSpec("mult_ratio: must be at least 1", field="mult_ratio")
        _check_eventual_positive(kind.p_coeffs, beyond, "p", MalformedSpec)
    else:
        if not kind.pairs and kind.tail is None:
            raise MalformedSpec("pairs: explicit spectrum needs pairs or a tail", field="pairs")
        _check_pairs(spec)
        if kind.tail is not None:
            _check_eventual_positive(kind.tail_mult, beyond, "tail_mult", MalformedSpec)
            if kind.tail.form == "log" and kind.n_start + len(kind.pairs) < 2:
                raise NonPositiveEigenvalue("tail: log(n) needs indices n >= 2", field="tail")
            if kind.tail.form in ("power", "log") and kind.n_start + len(kind.pairs) < 1:
                raise NonPositiveEigenvalue(f"tail: {kind.tail.text} vanishes at n = 0", field="tail")
    _check_prefix(spec)
    _check_head(spec)
    return spec


# ---------- Truncation ----------
def drop_leading_modes(spec: SpectrumSpec, count: int) -> Tuple[SpectrumSpec, List[Mode]]:
    """
    Remove the first `count` modes (head first, then base) and return them.
    """
    if count < 0:
        raise DomainError("truncation count must be non-negative", field="N")
    removed: List[Mode] = list(spec.head[:count])
    remaining_head = spec.head[count:]
    base_drop = max(0, count - len(spec.head))
    kind = spec.kind
    start = kind.n_start
    for n in range(start, start + base_drop):
        removed.append((eigenvalue(spec, n), multiplicity(spec, n)))
    if isinstance(kind, Explicit):
        if kind.tail is None and base_drop >= len(kind.pairs):
            raise DomainError("truncation removes the whole finite spectrum", field="N")
        new_kind: Kind = replace(kind, pairs=kind.pairs[base_drop:], n_start=start + base_drop)
    else:
        new_kind = replace(kind, n_start=start + base_drop)
    return replace(spec, kind=new_kind, head=tuple(remaining_head)), removed


# ---------- Counting function ----------
@dataclass(frozen=True)
class CountingPoint:
    """N(lam) at one threshold; count is exact whenever the multiplicities are rational."""
    lam: Union[Fraction, float]
    count: Union[Fraction, float]

    def to_record(self) -> dict:
        return {"lambda": self.lam, "count": self.count}


def last_index_below(spec: SpectrumSpec, lam) -> int:
    """Largest base index n with lambda_n <= lam; n_start - 1 when there is none."""
    start = spec.n_start
    length = base_length(spec)
    last = start + length - 1 if length is not None else None

    def below(n: int) -> bool:
        if last is not None and n > last:
            return False
        value = eigenvalue(spec, n)
        return value <= lam

    if not below(start):
        return start - 1
    lo, step = start, 1
    while True:
        hi = lo + step
        if last is not None and hi > last:
            hi = last + 1
        if not below(hi):
            break
        lo, step = hi, step * 2
        if step > 1 << 62:
            raise DomainError("counting function did not terminate", field="lambda")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            lo = mid
        else:
            hi = mid
    return lo


def counting_function(spec: SpectrumSpec, lam) -> CountingPoint:
    """
    N(lam): total multiplicity of eigenvalues <= lam, head modes included.
    @param lam: float or Fraction. Threshold, lam >= 0.
    """
    if not lam >= 0:
        raise DomainError(f"counting_function needs lambda >= 0, got {lam}", field="lambda")
    return CountingPoint(lam, _count_below(spec, lam))


def _count_below(spec: SpectrumSpec, lam) -> Union[Fraction, float]:
    total = sum((m for l, m in spec.head if l <= lam), Fraction(0))
    n_max = last_index_below(spec, lam)
    start = spec.n_start
    if n_max < start:
        return total
    kind = spec.kind
    if isinstance(kind, Polynomial):
        return total + power_sum(kind.b_coeffs, start, n_max)
    if isinstance(kind, Exponential):
        return total + sum(multiplicity(spec, n) for n in range(start, n_max + 1))
    n_pairs = len(kind.pairs)
    pair_end = min(n_max, start + n_pairs - 1)
    total += sum((m for _, m in kind.pairs[: pair_end - start + 1]), Fraction(0))
    if n_max >= start + n_pairs:
        total += power_sum(kind.tail_mult, start + n_pairs, n_max)
    return total


def first_positive_eigenvalue(spec: SpectrumSpec) -> float:
    for lam, _ in spec.head:
        if lam > 0:
            return float(lam)
    return float(eigenvalue(spec, spec.n_start))

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src import config
from src.catalog import catalog_entry, list_catalog
from src.continuation import Region, continue_zeta, pole_table
from src.errors import HeatTraceError, MalformedSpec, NoContinuation, NotTraceClass, UnknownName, UnsupportedClass
from src.expansion import (
    ConvergenceKind,
    HeatExpansion,
    JacobiRemainder,
    build_expansion,
    classify,
    divergence_evidence,
    exactness_radius,
    expansion_table,
    verification_table,
)
from src.specfun import (
    bernoulli_even_lower_bound,
    bernoulli_number,
    binomial,
    eulerian_number,
    gamma,
    hurwitz_zeta,
    hurwitz_zeta_nonpositive,
    riemann_zeta,
    riemann_zeta_nonpositive,
    theta3,
    theta4,
)
from src.spectrum import SpectrumSpec, counting_function, describe_spectrum, drop_leading_modes, make_spectrum
from src.tauberian import classify_lacunary, leading_order

logger = logging.getLogger(__name__)


# ---------- Run configuration ----------
@dataclass(frozen=True)
class TGrid:
    t_min: float
    t_max: float
    points: int
    spacing: str = "log"

    def values(self) -> List[float]:
        if self.points == 1:
            return [self.t_min]
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.t_min, self.t_max, self.points)]
        return [float(v) for v in np.linspace(self.t_min, self.t_max, self.points)]


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec_source: Optional[str]
    t_values: Tuple[float, ...]
    strips: int
    tol: float
    fmt: str
    out: Optional[str]
    depth: Optional[int]


def parse_t_grid(text: str) -> TGrid:
    """'min:max:points[:log|lin]'."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise MalformedSpec(f"--t-grid expects min:max:points[:log|lin], got {text!r}", field="t_grid")
    try:
        grid = TGrid(float(parts[0]), float(parts[1]), int(parts[2]), parts[3] if len(parts) == 4 else "log")
    except ValueError:
        raise MalformedSpec(f"--t-grid has a non-numeric entry in {text!r}", field="t_grid")
    if grid.spacing not in ("log", "lin"):
        raise MalformedSpec(f"--t-grid spacing must be log or lin, got {grid.spacing!r}", field="t_grid")
    if not grid.t_min > 0 or grid.t_max < grid.t_min:
        raise MalformedSpec("--t-grid needs 0 < min <= max", field="t_grid")
    if grid.points < 1:
        raise MalformedSpec("--t-grid needs at least one point", field="t_grid")
    return grid


def run_config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "t_grid", None):
        t_values = tuple(parse_t_grid(args.t_grid).values())
    else:
        t_values = tuple(getattr(args, "t", None) or (0.1, 1.0))
    if any(not t > 0 for t in t_values):
        raise MalformedSpec("--t values must be positive", field="t")
    tol = getattr(args, "tol", config.HEAT_TOL)
    if not tol > 0:
        raise MalformedSpec("--tol must be positive", field="tol")
    strips = getattr(args, "strips", config.DEFAULT_STRIPS)
    if strips < 1:
        raise MalformedSpec("--strips must be at least 1", field="strips")
    source = getattr(args, "spec", None) or getattr(args, "catalog", None)
    return RunConfig(args.command, source, t_values, strips, tol, args.format, args.out, getattr(args, "depth", None))


def load_spec(args: argparse.Namespace) -> SpectrumSpec:
    if getattr(args, "catalog", None):
        return catalog_entry(args.catalog).spec
    if getattr(args, "spec", None):
        try:
            with open(args.spec) as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise MalformedSpec(f"cannot read {args.spec}: {exc.strerror}", field="spec")
        except json.JSONDecodeError as exc:
            raise MalformedSpec(f"{args.spec} is not valid JSON: {exc.msg} (line {exc.lineno})", field="spec")
        return make_spectrum(raw)
    raise MalformedSpec("one of --spec or --catalog is required", field="spec")


# ---------- Output ----------
def _number(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, f".{config.JSON_DIGITS}g")


def to_json(obj: Any) -> str:
    """JSON with every float written to 17 significant digits; key order as given."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, complex):
        return f"[{_number(obj.real)}, {_number(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, pd.DataFrame):
        return to_json(obj.to_dict(orient="records"))
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    return json.dumps(str(obj))


def emit(cfg: RunConfig, record: dict, table: Optional[pd.DataFrame] = None) -> None:
    if cfg.fmt == "csv":
        frame = table if table is not None else pd.json_normalize(
            {k: v for k, v in record.items() if not isinstance(v, (list, dict))})
        text = frame.to_csv(index=False, float_format=f"%.{config.JSON_DIGITS}g")
    else:
        text = to_json(record) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def emit_error(error: HeatTraceError) -> None:
    sys.stderr.write(to_json(error.to_record()) + "\n")


# ---------- Renderers ----------
def render_classification(classification) -> dict:
    record = {
        "kind": classification.kind.value,
        "T": classification.radius,
        "absolute": classification.absolute,
        "heuristic": classification.heuristic,
    }
    remainder = classification.remainder
    if isinstance(remainder, JacobiRemainder):
        record["remainder"] = {"type": "JacobiRemainder", "a": remainder.a, "b0": remainder.b0,
                               "beta": remainder.beta, "theta": "theta4" if remainder.half_shifted else "theta3"}
    elif remainder is not None:
        record["remainder"] = {"type": type(remainder).__name__}
    record["evidence"] = classification.evidence
    return record


def render_expansion(expansion: HeatExpansion) -> dict:
    strips = []
    for strip in expansion.strips:
        bound = strip.bound
        strips.append({
            "index": strip.index,
            "R_lo": strip.r_lo,
            "R_hi": strip.r_hi,
            "bound": None if bound is None else {
                "R": bound.r, "C": bound.c, "eps": bound.eps, "analytic": bound.analytic,
                "fit_quality": bound.fit_quality,
            },
            "terms": [{
                "s0": term.s0,
                "log_degree": term.log_degree,
                "coefficients": list(term.coefficients),
                "exact": [str(c) for c in term.exact] if term.exact is not None else None,
                "provenance": term.provenance.value,
            } for term in strip.terms],
        })
    return {
        "class": expansion.data.class_tag.value,
        "truncation_head": [[str(l), str(m)] for l, m in expansion.truncation_head],
        "lines": list(expansion.plan.lines),
        "strips": strips,
    }


def render_tauberian(spec: SpectrumSpec) -> dict:
    lacunary = classify_lacunary(spec)
    record = {"lacunary": {"lacunary": lacunary.lacunary, "method": lacunary.method,
                           "ratios": list(lacunary.ratios)}}
    try:
        record["leading_order"] = leading_order(spec).to_record()
    except NotTraceClass as exc:
        record["leading_order"] = exc.to_record()
    return record


# ---------- Commands ----------
def cmd_expand(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    try:
        expansion = build_expansion(spec, cfg.strips, cfg.depth)
    except NoContinuation as exc:
        logger.warning("no continuation: %s", exc)
        record = {"command": "expand", "spec": describe_spectrum(spec),
                  "classification": {"kind": ConvergenceKind.NO_CONTINUATION.value, "reason": str(exc)},
                  "tauberian": render_tauberian(spec)}
        emit(cfg, record)
        return config.EXIT_NO_CONTINUATION
    record = {"command": "expand", "spec": describe_spectrum(spec),
              "classification": render_classification(expansion.classification)}
    record.update(render_expansion(expansion))
    if expansion.classification.kind == ConvergenceKind.DIVERGENT:
        record["divergence_evidence"] = divergence_evidence(expansion.data)
    emit(cfg, record, expansion_table(expansion))
    return config.EXIT_OK


def _violations(expansion: HeatExpansion, table: pd.DataFrame, tol: float) -> List[float]:
    classification = expansion.classification
    last = f"err_{len(expansion.strips)}"
    bad = []
    for _, row in table.iterrows():
        t, err = row["t"], row[last]
        if classification.kind == ConvergenceKind.EXACT and t < (classification.radius or 0):
            if abs(err) > tol * max(1.0, abs(row["direct"])):
                bad.append(t)
        elif isinstance(classification.remainder, JacobiRemainder):
            if abs(err - classification.remainder(t)) > tol * max(1.0, abs(row["direct"])):
                bad.append(t)
    return bad


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    try:
        expansion = build_expansion(spec, cfg.strips, cfg.depth, with_bounds=False)
    except NoContinuation as exc:
        emit(cfg, {"command": "verify", "classification": {"kind": ConvergenceKind.NO_CONTINUATION.value,
                                                           "reason": str(exc)},
                   "tauberian": render_tauberian(spec)})
        return config.EXIT_NO_CONTINUATION
    table = verification_table(expansion, cfg.t_values, min(cfg.tol, config.HEAT_TOL))
    err_columns = [c for c in table.columns if c.startswith("err_")]
    bad = _violations(expansion, table, cfg.tol)
    shown = table.copy()
    shown[err_columns] = shown[err_columns].abs()
    record = {"command": "verify", "classification": render_classification(expansion.classification),
              "tol": cfg.tol, "rows": shown, "violations": bad}
    emit(cfg, record, shown)
    if bad:
        logger.warning("tolerance %g violated at t = %s", cfg.tol, bad)
        return config.EXIT_ERROR
    return config.EXIT_OK


def cmd_classify(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    classification = classify(spec)
    record = {"command": "classify", "classification": render_classification(classification)}
    if classification.kind == ConvergenceKind.NO_CONTINUATION:
        record["tauberian"] = render_tauberian(spec)
        emit(cfg, record)
        return config.EXIT_NO_CONTINUATION
    emit(cfg, record)
    return config.EXIT_OK


def cmd_radius(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    try:
        expansion = build_expansion(spec, max(cfg.strips, 16), cfg.depth)
    except NoContinuation as exc:
        emit(cfg, {"command": "radius", "classification": {"kind": ConvergenceKind.NO_CONTINUATION.value,
                                                           "reason": str(exc)}})
        return config.EXIT_NO_CONTINUATION
    bounds = [s.bound for s in expansion.strips if s.bound is not None]
    estimate = exactness_radius(bounds, expansion.data)
    record = {"command": "radius", "analytic": estimate.analytic, "numeric": estimate.numeric,
              "running_max": estimate.running_max, "relative_gap": estimate.gap,
              "bounds": [{"R": b.r, "C": b.c, "eps": b.eps, "analytic": b.analytic} for b in bounds]}
    emit(cfg, record)
    return config.EXIT_OK


def _parse_number(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return complex(text.replace("i", "j"))
        except ValueError:
            raise MalformedSpec(f"cannot parse {text!r} as a number", field="args")


def _is_nonpositive_integer(value) -> bool:
    return isinstance(value, Fraction) and value.denominator == 1 and value <= 0


def cmd_specfun(args: argparse.Namespace, cfg: RunConfig) -> int:
    values = [_parse_number(a) for a in args.args]
    name = args.function
    arity = {"gamma": 1, "zeta": 1, "hurwitz": 2, "bernoulli": 1, "eulerian": 2, "theta3": 1, "theta4": 1,
             "binomial": 2, "bernoulli_bound": 1}
    if name not in arity:
        raise UnknownName(f"Unknown special function {name!r}", field="function")
    if len(values) != arity[name]:
        raise MalformedSpec(f"{name} takes {arity[name]} argument(s), got {len(values)}", field="args")
    exact = None
    if name == "gamma":
        value = gamma(values[0])
    elif name == "zeta":
        value = riemann_zeta(values[0])
        if _is_nonpositive_integer(values[0]):
            exact = riemann_zeta_nonpositive(int(-values[0]))
    elif name == "hurwitz":
        value = hurwitz_zeta(values[0], values[1])
        if _is_nonpositive_integer(values[0]) and isinstance(values[1], Fraction):
            exact = hurwitz_zeta_nonpositive(int(-values[0]), values[1])
    elif name == "bernoulli":
        exact = bernoulli_number(int(values[0]))
        value = float(exact)
    elif name == "bernoulli_bound":
        value = bernoulli_even_lower_bound(int(values[0]))
    elif name == "eulerian":
        exact = Fraction(eulerian_number(int(values[0]), int(values[1])))
        value = float(exact)
    elif name == "theta3":
        value = theta3(float(values[0]))
    elif name == "theta4":
        value = theta4(float(values[0]))
    else:
        value = binomial(values[0], int(values[1]))
        exact = value if isinstance(value, Fraction) else None
        value = complex(value)
    if isinstance(value, complex) and value.imag == 0:
        value = value.real
    emit(cfg, {"command": "specfun", "function": name, "args": list(args.args), "value": value,
               "exact": None if exact is None else str(exact)})
    return config.EXIT_OK


def cmd_poles(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    try:
        data = continue_zeta(drop_leading_modes(spec, len(spec.head))[0], Region(args.r_max, args.y_max), cfg.depth)
    except UnsupportedClass as exc:
        emit(cfg, {"command": "poles", "classification": {"kind": ConvergenceKind.NO_CONTINUATION.value,
                                                          "reason": str(exc)}})
        return config.EXIT_NO_CONTINUATION
    table = pole_table(data)
    emit(cfg, {"command": "poles", "class": data.class_tag.value, "validity": data.validity,
               "cancelled": list(data.cancelled), "poles": table}, table)
    return config.EXIT_OK


def cmd_tauberian(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    record = {"command": "tauberian"}
    record.update(render_tauberian(spec))
    emit(cfg, record)
    return config.EXIT_OK


def cmd_count(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec(args)
    thresholds = [_parse_number(text) for text in args.lambdas]
    if any(isinstance(lam, complex) for lam in thresholds):
        raise MalformedSpec("--lambda values must be real", field="lambda")
    table = pd.DataFrame([counting_function(spec, lam).to_record() for lam in thresholds],
                         columns=["lambda", "count"])
    emit(cfg, {"command": "count", "points": table}, table)
    return config.EXIT_OK


def cmd_catalog(
args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.action == "list":
        table = list_catalog()
        emit(cfg, {"command": "catalog list", "entries": table}, table)
        return config.EXIT_OK
    if not args.name:
        raise MalformedSpec("catalog show needs an entry name", field="name")
    entry = catalog_entry(args.name)
    record = {"command": "catalog show"}
    record.update(entry.to_record())
    record["spec"] = describe_spectrum(entry.spec)
    emit(cfg, record)
    return config.EXIT_OK


COMMANDS = {
    "expand": cmd_expand,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "radius": cmd_radius,
    "specfun": cmd_specfun,
    "poles": cmd_poles,
    "tauberian": cmd_tauberian,
    "count": cmd_count,
    "catalog": cmd_catalog,
}


# ---------- Parser ----------
class ArgumentParser(argparse.ArgumentParser):
    """Usage errors become MalformedSpec so that exit status 2 stays reserved."""

    def error(self, message: str):
        raise MalformedSpec(message, field="argv")


def _add_common(parser: argparse.ArgumentParser, with_spec: bool = True) -> None:
    if with_spec:
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--spec", help="Path to a JSON spectrum file")
        source.add_argument("--catalog", help="Catalog entry, e.g. sphere_absD:3")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--out", help="Write the report here instead of stdout")
    parser.add_argument("--log-level", type=str.upper, default=config.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="heat-trace", description="Heat trace expansions from spectral data")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("expand", "verify", "classify", "radius"):
        cmd = sub.add_parser(name)
        _add_common(cmd)
        cmd.add_argument("--strips", type=int, default=config.DEFAULT_STRIPS)
        cmd.add_argument("--depth", type=int)
        times = cmd.add_mutually_exclusive_group()
        times.add_argument("--t", type=float, nargs="+")
        times.add_argument("--t-grid")
        cmd.add_argument("--tol", type=float, default=config.HEAT_TOL)

    specfun = sub.add_parser("specfun")
    specfun.add_argument("function")
    specfun.add_argument("args", nargs="*")
    _add_common(specfun, with_spec=False)

    poles = sub.add_parser("poles")
    _add_common(poles)
    poles.add_argument("--r-max", type=float, default=config.DEFAULT_REGION_R)
    poles.add_argument("--y-max", type=float, default=config.DEFAULT_REGION_Y)
    poles.add_argument("--depth", type=int)

    tauberian = sub.add_parser("tauberian")
    _add_common(tauberian)

    count = sub.add_parser("count")
    _add_common(count)
    count.add_argument("--lambda", dest="lambdas", nargs="+", required=True)

    catalog = sub.add_parser("catalog")
    catalog.add_argument("action", choices=["list", "show"])
    catalog.add_argument("name", nargs="?")
    _add_common(catalog, with_spec=False)
    return parser


def run(args: argparse.Namespace) -> int:
    """Dispatch a parsed command; library errors become stderr records and exit status 1."""
    try:
        cfg = run_config(args)
        return COMMANDS[args.command](args, cfg)
    except HeatTraceError as exc:
        emit_error(exc)
        return config.EXIT_ERROR
    except Exception as exc:
        logger.exception("%s failed", args.command)
        sys.stderr.write(to_json({"error": type(exc).__name__, "message": str(exc), "field": None}) + "\n")
        return config.EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except HeatTraceError as exc:
        emit_error(exc)
        return config.EXIT_ERROR
    logging.getLogger().setLevel(args.log_level)
    return run(args)

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from src.catalog import catalog_entry
from src.continuation import Region, continue_zeta
from src.dirichlet import heat_trace_direct
from src.errors import DepthInsufficient, NoContinuation, NotTraceClass, PoleOnLine
from src.expansion import (
    ConvergenceKind,
    JacobiRemainder,
    build_expansion,
    classify,
    divergence_evidence,
    evaluate_expansion,
    expansion_table,
    exactness_radius,
    fit_remainder_bound,
    partial_sums,
    plan_strips,
    remainder_fr,
    residue_term,
    verification_table,
)
from src.specfun import theta3
from src.spectrum import make_spectrum

DYADIC = [2.0 ** -k for k in range(1, 5)]


def spec_of(name):
    return catalog_entry(name).spec


# ---------- Exact polynomial class ----------
def test_linear_expansion_terms_are_exact():
    expansion = build_expansion(spec_of("linear_n"), 5, with_bounds=False)
    leading = [strip.terms[0].exact[0] for strip in expansion.strips]
    assert leading == [Fraction(1), Fraction(-1, 2), Fraction(1, 12), Fraction(-1, 720), Fraction(1, 30240)]
    assert [strip.terms[0].s0.real for strip in expansion.strips] == [1.0, 0.0, -1.0, -3.0, -5.0]


def test_linear_expansion_at_unit_time():
    expansion = build_expansion(spec_of("linear_n"), 5, with_bounds=False)
    assert abs(evaluate_expansion(expansion, 1.0) - 1 / math.expm1(1.0)) < 1e-6
    assert abs(evaluate_expansion(expansion, 0.1) - 1 / math.expm1(0.1)) < 1e-12


def test_circle_expansion_inside_the_radius():
    expansion = build_expansion(spec_of("sphere_absD:1"), 10, with_bounds=False)
    assert abs(evaluate_expansion(expansion, 0.1) - 1 / math.sinh(0.05)) < 1e-10
    table = verification_table(expansion, [1.0])
    errors = [abs(table[f"err_{n}"].iloc[0]) for n in range(3, 11)]
    assert errors[-1] < 1e-8
    assert errors[-1] < errors[0]


def test_circle_expansion_diverges_beyond_the_radius():
    expansion = build_expansion(spec_of("sphere_absD:1"), 14, with_bounds=False)
    table = verification_table(expansion, [7.0])
    errors = np.array([abs(table[f"err_{n}"].iloc[0]) for n in range(1, 15)])
    best = int(np.argmin(errors))
    assert best < len(errors) - 1
    assert errors[-1] > 2 * errors[best]


def test_linear_classification():
    result = classify(spec_of("linear_n"))
    assert result.kind == ConvergenceKind.EXACT
    assert result.radius == pytest.approx(2 * math.pi)
    assert result.absolute


# ---------- Almost exact ----------
def test_theta_operator_main_terms_and_remainder():
    expansion = build_expansion(spec_of("theta_operator"), 2)
    result = expansion.classification
    assert result.kind == ConvergenceKind.ALMOST_EXACT
    assert result.radius == math.inf
    assert isinstance(result.remainder, JacobiRemainder)
    for t in (0.5, 1.0, 2.0):
        main = 0.5 * math.sqrt(math.pi / t) + 0.5
        assert evaluate_expansion(expansion, t) == pytest.approx(main, rel=1e-14)
        direct = heat_trace_direct(expansion.spec, t)
        assert abs(direct - main - result.remainder(t)) < 1e-9
    assert abs(result.remainder(1.0)) == pytest.approx(9.17e-5, rel=0.01)


def test_jacobi_remainder_matches_theta():
    remainder = JacobiRemainder(1.0, 1.0, 0.0, False)
    t = 1.0
    expected = 0.5 * math.sqrt(math.pi / t) * (theta3(math.exp(-math.pi ** 2 / t)) - 1)
    assert remainder(t) == pytest.approx(expected, rel=1e-14)
    assert remainder(1e-4) == 0.0


@pytest.mark.parametrize("name", ["half_square", "sphere_Dpow:1,2"])
def test_half_shifted_squares_are_almost_exact(name):
    result = classify(spec_of(name))
    assert result.kind == ConvergenceKind.ALMOST_EXACT
    assert result.remainder.half_shifted


def test_half_square_remainder():
    spec = spec_of("half_square")
    result = classify(spec)
    for t in (0.5, 2.0):
        main = 0.5 * math.sqrt(math.pi / t)
        assert abs(heat_trace_direct(spec, t) - main - result.remainder(t)) < 1e-9


# ---------- Exponential ----------
@pytest.mark.parametrize("t", [0.01, 1.0])
def test_exponential_expansion(t):
    spec = spec_of("q_exponential")
    expansion = build_expansion(spec, 12, with_bounds=False)
    direct = heat_trace_direct(spec, t)
    assert abs(evaluate_expansion(expansion, t) - direct) <= 1e-8 * direct


def test_exponential_expansion_at_large_time():
    spec = spec_of("q_exponential")
    expansion = build_expansion(spec, 60, with_bounds=False)
    direct = heat_trace_direct(spec, 10.0)
    assert abs(evaluate_expansion(expansion, 10.0) - direct) <= 1e-8 * direct


def test_exponential_partial_sums_are_real():
    expansion = build_expansion(spec_of("q_exponential"), 6, with_bounds=False)
    for t in (0.05, 0.5, 2.0):
        sums = partial_sums(expansion, t)
        assert np.all(np.abs(sums.imag) < 1e-12)
        strict = partial_sums(expansion, t, strict_grouping=True)
        assert np.allclose(sums, strict, rtol=0, atol=1e-12)


def test_growing_multiplicity_expansion():
    spec = spec_of("pow2_pow2")
    expansion = build_expansion(spec, 12, with_bounds=False)
    assert expansion.classification.kind == ConvergenceKind.EXACT
    assert expansion.classification.radius == math.inf
    direct = heat_trace_direct(spec, 0.5)
    assert evaluate_expansion(expansion, 0.5) == pytest.approx(direct, rel=1e-6)


# ---------- Divergent ----------
def test_sphere_dpow_is_divergent():
    result = classify(spec_of("sphere_Dpow:2,2"))
    assert result.kind == ConvergenceKind.DIVERGENT
    assert result.heuristic
    assert result.radius is None
    assert result.evidence["same_sign"]
    assert result.evidence["ratios_increasing"]
    assert result.evidence["growth_from_p_at_t=1"] <= 12


def test_divergence_evidence_table():
    data = continue_zeta(spec_of("sphere_Dpow:2,2"))
    table = divergence_evidence(data, 12)
    assert list(table.columns) == ["p", "d_p", "sign", "ratio", "abs_d_p_t^p(t=0.1)", "abs_d_p_t^p(t=1)"]
    assert (table["sign"] == -1).all()
    assert table["ratio"].iloc[1:].is_monotonic_increasing


# ---------- No continuation ----------
def test_explicit_tail_has_no_continuation():
    with pytest.raises(NoContinuation):
        build_expansion(spec_of("lacunary_gauss"), 4)
    assert classify(spec_of("lacunary_gauss")).kind == ConvergenceKind.NO_CONTINUATION


def test_shifted_exponential_is_summed_but_not_continued():
    plain = make_spectrum({"kind": "exponential", "q": "1/2"})
    shifted = make_spectrum({"kind": "exponential", "q": "1/2", "shift": 1})
    for t in (0.1, 1.0):
        assert heat_trace_direct(shifted, t) == pytest.approx(math.exp(-t) * heat_trace_direct(plain, t), rel=1e-10)
    classification = classify(shifted)
    assert classification.kind == ConvergenceKind.NO_CONTINUATION
    assert "shift" in classification.evidence["reason"]
    with pytest.raises(NoContinuation) as err:
        build_expansion(shifted, 3)
    assert err.value.field == "shift"



def test_log_spectrum_is_not_trace_class():
    with pytest.raises(NotTraceClass):
        build_expansion(spec_of("log_spectrum"), 4)


# ---------- Remainders ----------
def test_remainder_integral_matches_direct_residual():
    spec = spec_of("linear_n")
    expansion = build_expansion(spec, 3, with_bounds=False)
    line = expansion.plan.lines[3]
    assert line == pytest.approx(2.0)
    for t in (0.5, 1.0):
        residual = heat_trace_direct(spec, t) - evaluate_expansion(expansion, t)
        assert abs(remainder_fr(expansion.data, line, t) - residual) < 1e-9


def test_remainder_bound_is_analytic_on_even_lines():
    data = continue_zeta(spec_of("linear_n"))
    bound = fit_remainder_bound(data, 2.0)
    assert bound.analytic
    assert bound.eps == pytest.approx(math.pi / 2)
    with pytest.raises(PoleOnLine):
        fit_remainder_bound(data, 1.0)


@pytest.mark.parametrize("name, strip", [("linear_n", 4), ("circle_nontrivial_spin", 3), ("q_exponential", 3)])
def test_residuals_respect_the_strip_bound(name, strip):
    spec = spec_of(name)
    expansion = build_expansion(spec, strip)
    bound = expansion.strips[strip - 1].bound
    assert bound.r > 0
    for t in DYADIC:
        residual = heat_trace_direct(spec, t) - evaluate_expansion(expansion, t)
        assert abs(residual) <= bound.value(t) * 1.05


@pytest.mark.parametrize("name, strip", [("linear_n", 4), ("circle_nontrivial_spin", 3), ("q_exponential", 3)])
def test_remainder_over_t_to_the_r_is_bounded_and_decays(name, strip):
    expansion = build_expansion(spec_of(name), strip)
    bound = expansion.strips[strip - 1].bound
    ratios = {}
    for j in range(3, 21):
        t = 2.0 ** -j
        ratios[j] = abs(remainder_fr(expansion.data, bound.r, t, bound)) / t ** bound.r
        assert ratios[j] <= bound.c / (bound.eps * math.pi) * 1.05
    assert ratios[20] < ratios[10]


@pytest.mark.parametrize("name", ["linear_n", "circle_nontrivial_spin", "q_exponential"])
def test_scaling_maps_each_term_to_the_term_at_scaled_time(name):
    c = 3
    spec = spec_of(name)
    base = build_expansion(spec, 3, with_bounds=False)
    scaled = build_expansion(replace(spec, scale=spec.scale * c), 3, with_bounds=False)
    for plain, stretched in zip(base.strips, scaled.strips):
        by_location = {(round(term.s0.real, 9), round(term.s0.imag, 9)): term for term in plain.terms}
        assert len(by_location) == len(stretched.terms)
        for term in stretched.terms:
            match = by_location[(round(term.s0.real, 9), round(term.s0.imag, 9))]
            for t in (0.05, 0.3):
                assert term.value(t) == pytest.approx(match.value(c * t), rel=1e-10, abs=1e-14)



def test_numeric_radius_of_the_circle():
    expansion = build_expansion(spec_of("sphere_absD:1"), 16)
    estimate = exactness_radius([s.bound for s in expansion.strips], expansion.data)
    assert estimate.analytic == pytest.approx(2 * math.pi)
    assert estimate.numeric == pytest.approx(2 * math.pi, rel=0.05)
    assert estimate.gap < 0.05


def test_numeric_radius_of_the_three_sphere():
    expansion = build_expansion(spec_of("sphere_absD:3"), 16)
    estimate = exactness_radius([s.bound for s in expansion.strips], expansion.data)
    assert estimate.analytic == pytest.approx(2 * math.pi)
    assert 0.9 * 2 * math.pi <= estimate.numeric <= 1.1 * 2 * math.pi


def test_numeric_radius_of_exponential_spectrum_is_infinite():
    expansion = build_expansion(spec_of("q_exponential"), 16)
    estimate = exactness_radius([s.bound for s in expansion.strips], expansion.data)
    assert estimate.numeric == math.inf


# ---------- Tables ----------
def test_expansion_table_columns():
    table = expansion_table(build_expansion(spec_of("linear_n"), 3, with_bounds=False))
    assert list(table.columns) == ["strip", "s0_re", "s0_im", "log_power", "coeff_re", "coeff_im",
                                   "provenance", "exact"]
    assert list(table["exact"]) == ["1", "-1/2", "1/12"]


def test_verification_table_columns():
    expansion = build_expansion(spec_of("linear_n"), 2, with_bounds=False)
    table = verification_table(expansion, [0.5, 1.0])
    assert list(table.columns) == ["t", "direct", "partial_1", "partial_2", "err_1", "err_2"]
    assert len(table) == 2


# ---------- Residues and strips ----------
def test_residue_term_of_a_double_pole():
    data = continue_zeta(spec_of("q_exponential"))
    pole = next(p for p in data.z_poles if abs(p.location) < 1e-12)
    term = residue_term(pole)
    assert len(term.coefficients) == 2
    assert term.coefficients[1] == pytest.approx(1 / math.log(2), rel=1e-12)


def test_plan_strips_groups_every_pole_once():
    data = continue_zeta(spec_of("linear_n"))
    plan = plan_strips(data, 4)
    assert len(plan.lines) == 5
    assert len(plan.cells) == 4
    grouped = [p.location.real for strip in plan.cells for cell in strip for p in cell]
    assert sorted(grouped, reverse=True) == [1.0, 0.0, -1.0, -3.0]


def test_plan_strips_beyond_the_region():
    data = continue_zeta(spec_of("linear_n"), Region(r_max=4.0))
    with pytest.raises(DepthInsufficient):
        plan_strips(data, 8)

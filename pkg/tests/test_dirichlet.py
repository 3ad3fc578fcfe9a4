import math

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy import special

from src.catalog import catalog_entry
from src.dirichlet import (
    abscissa,
    growth_table,
    heat_trace_direct,
    mellin_transform_direct,
    zeta_direct,
)
from src.errors import DomainError, NotTraceClass, OutsideHalfPlane
from src.specfun import riemann_zeta
from src.spectrum import drop_leading_modes, explicit_spectrum, polynomial_spectrum

SLOW = settings(max_examples=20, deadline=None)


def spec_of(name):
    return catalog_entry(name).spec


@pytest.mark.parametrize("name, expected", [
    ("linear_n", 1.0),
    ("sphere_absD:2", 2.0),
    ("theta_operator", 0.5),
    ("q_exponential", 0.0),
    ("lacunary_gauss", 0.0),
])
def test_abscissa_closed_forms(name, expected):
    meta = abscissa(spec_of(name))
    assert meta.method == "analytic"
    assert meta.heat_well_defined
    assert meta.abscissa_zeta == pytest.approx(expected)


def test_abscissa_exponential_with_growing_multiplicity():
    assert abscissa(spec_of("pow2_pow2")).abscissa_zeta == pytest.approx(1.0)


def test_log_spectrum_has_no_heat_trace():
    spec = spec_of("log_spectrum")
    assert not abscissa(spec).heat_well_defined
    with pytest.raises(NotTraceClass):
        heat_trace_direct(spec, 1.0)


@SLOW
@given(st.floats(min_value=0.01, max_value=5))
def test_heat_trace_linear_closed_form(t):
    exact = 1.0 / math.expm1(t)
    assert abs(heat_trace_direct(spec_of("linear_n"), t) - exact) <= 1e-10 * exact


@SLOW
@given(st.floats(min_value=0.05, max_value=5))
def test_heat_trace_circle_closed_forms(t):
    assert heat_trace_direct(spec_of("circle_nontrivial_spin"), t) == pytest.approx(1 / math.sinh(t / 2), rel=1e-10)
    assert heat_trace_direct(spec_of("circle_trivial_spin"), t) == pytest.approx(1 / math.tanh(t / 2), rel=1e-10)


def test_heat_trace_needs_positive_time():
    with pytest.raises(DomainError):
        heat_trace_direct(spec_of("linear_n"), 0.0)


def test_heat_trace_finite_spectrum():
    spec = explicit_spectrum(pairs=[(1, 1), (2, 3)])
    assert heat_trace_direct(spec, 0.5) == pytest.approx(math.exp(-0.5) + 3 * math.exp(-1.0), rel=1e-14)


@given(st.integers(min_value=0, max_value=12), st.floats(min_value=0.05, max_value=3))
def test_truncation_identity(count, t):
    spec = spec_of("circle_trivial_spin")
    rest, removed = drop_leading_modes(spec, count)
    removed_heat = math.fsum(float(m) * math.exp(-t * float(l)) for l, m in removed)
    assert heat_trace_direct(spec, t) == pytest.approx(heat_trace_direct(rest, t) + removed_heat, rel=1e-11)


@given(st.sampled_from([2, 3, 5]), st.floats(min_value=0.05, max_value=2))
def test_scaling_covariance(c, t):
    base = polynomial_spectrum([1, 1], [1])
    scaled = polynomial_spectrum([1, 1], [1], scale=c)
    assert heat_trace_direct(scaled, t) == pytest.approx(heat_trace_direct(base, c * t), rel=1e-10)


def test_zeta_direct_linear():
    spec = spec_of("linear_n")
    assert abs(zeta_direct(spec, 2) - math.pi ** 2 / 6) < 1e-11
    s = complex(3, 4)
    assert abs(zeta_direct(spec, s) - riemann_zeta(s)) < 1e-11


def test_zeta_direct_half_integer_shift():
    s = 2.5
    expected = 2 * (2 ** s - 1) * riemann_zeta(s).real
    assert zeta_direct(spec_of("circle_nontrivial_spin"), s).real == pytest.approx(expected, rel=1e-11)


def test_zeta_direct_exponential():
    # sum_n 2^{-n s} = 1 / (1 - 2^{-s})
    value = zeta_direct(spec_of("q_exponential"), 1.5)
    assert value.real == pytest.approx(1 / (1 - 2 ** -1.5), rel=1e-11)


def test_zeta_direct_outside_half_plane():
    with pytest.raises(OutsideHalfPlane):
        zeta_direct(spec_of("linear_n"), 1.05)


def test_mellin_transform_matches_gamma_times_zeta():
    s = 2.5
    expected = special.gamma(s) * 2 * (2 ** s - 1) * riemann_zeta(s).real
    assert mellin_transform_direct(spec_of("circle_nontrivial_spin"), s) == pytest.approx(expected, rel=1e-6)


def test_mellin_transform_rejects_zero_modes():
    with pytest.raises(DomainError):
        mellin_transform_direct(spec_of("circle_trivial_spin"), 2.5)


def test_growth_table_bounded_at_the_abscissa():
    table = growth_table(spec_of("linear_n"), [1.0, 0.5])
    assert list(table.columns) == ["t", "h", "t^1 h", "t^0.5 h"]
    assert len(table) == 10
    assert table["t^1 h"].between(0.4, 1.0).all()
    assert table["t^0.5 h"].iloc[-1] > table["t^0.5 h"].iloc[0]


def test_abscissa_exact_for_quadratic_eigenvalues():
    spec = polynomial_spectrum([0, 0, 1], [0, 1], n_start=1)
    meta = abscissa(spec)
    assert meta.exact == 1
    assert meta.abscissa_zeta == 1.0


def test_numeric_abscissa_of_listed_spectrum():
    pairs = [(n * n, n) for n in range(1, 100_001)]
    meta = abscissa(explicit_spectrum(pairs=pairs, n_start=1))
    assert meta.method == "numeric_limsup"
    assert meta.indices_used == 100_000
    assert abs(meta.abscissa_zeta - 1.0) < 0.05
    assert meta.heat_well_defined

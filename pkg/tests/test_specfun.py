import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy import special

from src.errors import DomainError, PoleAt
from src.specfun import (
    bernoulli_number,
    bernoulli_even_lower_bound,
    bernoulli_polynomial,
    bernoulli_polynomial_coeffs,
    binomial,
    eulerian_number,
    eulerian_row,
    gamma,
    gamma_residue,
    hurwitz_zeta,
    hurwitz_zeta_nonpositive,
    rising_factorial,
    riemann_zeta,
    riemann_zeta_nonpositive,
    theta3,
    theta4,
)
from src.series import poly_eval

SLOW = settings(max_examples=25, deadline=None)


# ---------- Gamma ----------
def test_gamma_half():
    assert abs(gamma(0.5) - math.sqrt(math.pi)) < 1e-14


@pytest.mark.parametrize("n", [0, -3])
def test_gamma_poles_raise(n):
    with pytest.raises(PoleAt) as err:
        gamma(n)
    assert err.value.pole == n


@SLOW
@given(st.floats(min_value=0.1, max_value=5), st.floats(min_value=-5, max_value=5))
def test_gamma_recurrence(x, y):
    s = complex(x, y)
    assert abs(gamma(s + 1) - s * gamma(s)) <= 1e-12 * abs(gamma(s + 1))


def test_gamma_residue_values():
    assert gamma_residue(0) == 1
    assert gamma_residue(3) == Fraction(-1, 6)
    with pytest.raises(DomainError):
        gamma_residue(-1)


# ---------- Riemann zeta ----------
def test_zeta_two():
    assert abs(riemann_zeta(2) - math.pi ** 2 / 6) < 1e-14


def test_zeta_exact_nonpositive():
    assert riemann_zeta_nonpositive(0) == Fraction(-1, 2)
    assert riemann_zeta_nonpositive(1) == Fraction(-1, 12)
    assert riemann_zeta_nonpositive(2) == 0
    assert riemann_zeta(-1) == complex(-1 / 12)


def test_zeta_pole():
    with pytest.raises(PoleAt):
        riemann_zeta(1)


def test_zeta_known_values_both_sides_of_the_critical_line():
    assert abs(riemann_zeta(0.5) - (-1.4603545088095868)) < 1e-12
    assert abs(riemann_zeta(-0.5) - (-0.2078862249773545)) < 1e-12


@SLOW
@given(st.floats(min_value=-40, max_value=40))
def test_zeta_reflection_branch_is_continuous(y):
    left = riemann_zeta(complex(0.5 - 1e-10, y))
    right = riemann_zeta(complex(0.5, y))
    assert abs(left - right) < 1e-7 * max(1.0, abs(right))


@SLOW
@given(st.floats(min_value=-1.5, max_value=2.5).filter(lambda x: abs(x - 1) > 0.05 and abs(x) > 0.05 and abs(x - 2) > 0.05),
       st.floats(min_value=-30, max_value=30))
def test_zeta_functional_equation(x, y):
    s = complex(x, y)
    rhs = 2 ** s * math.pi ** (s - 1) * cmath.sin(math.pi * s / 2) * gamma(1 - s) * riemann_zeta(1 - s)
    lhs = riemann_zeta(s)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_zeta_large_imaginary_part_is_finite():
    value = riemann_zeta(complex(-3.5, 1500.0))
    assert math.isfinite(value.real) and math.isfinite(value.imag)


# ---------- Hurwitz ----------
def test_hurwitz_exact_values():
    assert hurwitz_zeta_nonpositive(0, Fraction(1, 2)) == 0
    assert hurwitz_zeta_nonpositive(1, Fraction(3, 2)) == Fraction(-11, 24)
    assert abs(hurwitz_zeta(-1, Fraction(3, 2)) - (-11 / 24)) < 1e-15


def test_hurwitz_matches_scipy():
    assert abs(hurwitz_zeta(3, 0.3) - special.zeta(3, 0.3)) < 1e-12 * special.zeta(3, 0.3)


@SLOW
@given(st.floats(min_value=1.5, max_value=8), st.floats(min_value=0.1, max_value=5))
def test_hurwitz_real_axis_against_scipy(x, alpha):
    expected = special.zeta(x, alpha)
    assert abs(hurwitz_zeta(x, alpha) - expected) <= 1e-10 * expected


def test_hurwitz_alpha_one_is_riemann():
    s = complex(2.5, 7.0)
    assert abs(hurwitz_zeta(s, 1) - riemann_zeta(s)) < 1e-12


@SLOW
@given(st.sampled_from([Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), Fraction(5, 3)]),
       st.floats(min_value=-3, max_value=-0.1), st.floats(min_value=-5, max_value=5))
def test_hurwitz_reflection_agrees_with_direct_summation(alpha, x, y):
    s = complex(x, y)
    if abs(y) < 1e-3 and abs(x - round(x)) < 1e-3:
        s = complex(x + 0.01, y)
    reflected = hurwitz_zeta(s, alpha)
    direct = hurwitz_zeta(s, float(alpha))
    assert abs(reflected - direct) <= 1e-8 * max(1.0, abs(direct))


def test_hurwitz_rejects_nonpositive_alpha():
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 0)


@pytest.mark.parametrize("alpha", [0.001, 0.3, 0.8, 2.7])
def test_hurwitz_float_alpha_far_left_matches_bernoulli(alpha):
    expected = -bernoulli_polynomial(11, alpha) / 11
    assert hurwitz_zeta(-10, alpha).real == pytest.approx(expected, rel=1e-9, abs=1e-13)


def test_hurwitz_float_alpha_matches_reflection_off_axis():
    s = complex(-10.2, 3.0)
    assert hurwitz_zeta(s, 0.5) == pytest.approx(hurwitz_zeta(s, Fraction(1, 2)), rel=1e-9)
    assert hurwitz_zeta(s, 2.25) == pytest.approx(hurwitz_zeta(s, Fraction(9, 4)), rel=1e-9)


def test_hurwitz_large_denominator_reflects():
    s = complex(-8.5, 2.0)
    reflected = hurwitz_zeta(s, Fraction(1, 101))
    assert reflected == pytest.approx(hurwitz_zeta(s, 1 / 101), rel=1e-8)


# ---------- Bernoulli ----------
def test_bernoulli_first_values():
    assert [bernoulli_number(n) for n in range(5)] == [1, Fraction(1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    assert bernoulli_number(12) == Fraction(-691, 2730)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 20, 40])
def test_even_bernoulli_lower_bound(n):
    ratio = abs(float(bernoulli_number(2 * n))) / bernoulli_even_lower_bound(n)
    assert ratio == pytest.approx(riemann_zeta(2 * n).real, rel=1e-10)


@given(st.integers(min_value=1, max_value=40))
def test_odd_bernoulli_numbers_vanish(k):
    assert bernoulli_number(2 * k + 1) == 0


@given(st.integers(min_value=0, max_value=20), st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_bernoulli_polynomial_reflection(n, x):
    assert bernoulli_polynomial(n, 1 - x) == (-1) ** n * bernoulli_polynomial(n, x)


@given(st.integers(min_value=0, max_value=20), st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_bernoulli_polynomial_difference(n, x):
    assert bernoulli_polynomial(n + 1, x + 1) - bernoulli_polynomial(n + 1, x) == (n + 1) * x ** n


@given(st.integers(min_value=0, max_value=20), st.fractions(min_value=-2, max_value=2, max_denominator=20))
def test_bernoulli_coefficients_match_polynomial(n, x):
    assert poly_eval(bernoulli_polynomial_coeffs(n), x) == bernoulli_polynomial(n, x)


def test_bernoulli_polynomial_at_one():
    for n in range(10):
        assert bernoulli_polynomial(n, 1) == bernoulli_number(n)


# ---------- Eulerian ----------
def test_eulerian_rows():
    assert eulerian_row(0) == (1,)
    assert eulerian_row(3) == (1, 4, 1)
    assert eulerian_row(4) == (1, 11, 11, 1)
    assert eulerian_number(4, 1) == 11
    assert eulerian_number(3, 7) == 0


@given(st.integers(min_value=1, max_value=15))
def test_eulerian_row_sum_and_symmetry(j):
    row = eulerian_row(j)
    assert sum(row) == math.factorial(j)
    assert row == row[::-1]


@given(st.integers(min_value=1, max_value=10), st.integers(min_value=1, max_value=12))
def test_worpitzky_identity(j, x):
    total = sum(a * math.comb(x + k, j) for k, a in enumerate(eulerian_row(j)))
    assert total == x ** j


# ---------- Theta ----------
@SLOW
@given(st.floats(min_value=0.2, max_value=5))
def test_theta3_jacobi_inversion(x):
    lhs = theta3(math.exp(-math.pi * x))
    rhs = theta3(math.exp(-math.pi / x)) / math.sqrt(x)
    assert abs(lhs - rhs) < 1e-12 * lhs


def test_theta4_small_q():
    q = 0.01
    assert abs(theta4(q) - (1 - 2 * q + 2 * q ** 4)) < 1e-15


def test_theta_domain():
    with pytest.raises(DomainError):
        theta3(1.0)


# ---------- Binomial ----------
def test_binomial_and_rising_factorial():
    assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert binomial(5, 2) == 10
    assert rising_factorial(3, 3) == 60
    assert rising_factorial(Fraction(1, 2), 0) == 1


@given(st.integers(min_value=-10, max_value=10), st.integers(min_value=0, max_value=10))
def test_binomial_is_signed_rising_factorial(s, j):
    assert binomial(s, j) == (-1) ** j * rising_factorial(-s, j) / math.factorial(j)


def test_binomial_deep_complex_stays_finite():
    value = binomial(complex(0.75, -100.0), 200)
    assert cmath.isfinite(value) and value != 0


@pytest.mark.parametrize("j", [171, 200])
def test_binomial_deep_exact(j):
    assert binomial(250, j) == math.comb(250, j)
    assert (binomial(Fraction(1, 2), j) > 0) == (j % 2 == 1)

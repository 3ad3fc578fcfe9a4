import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from src.errors import DomainError
from src.series import (
    exp_linear_series,
    poly_degree,
    poly_derivative,
    poly_eval,
    poly_mul,
    poly_pow,
    power_sum,
    root_bound,
    series_exp,
    series_log,
    series_mul,
    series_reciprocal,
    taylor_shift,
)

small_polys = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1, max_size=5)


def test_poly_basics():
    p = (Fraction(1), Fraction(2), Fraction(1))
    assert poly_pow((1, 1), 2) == p
    assert poly_degree((0, 0)) == -1
    assert poly_degree(p) == 2
    assert poly_derivative(p) == (2, 2)


@given(small_polys, small_polys, st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_poly_mul_evaluates_as_product(p, q, x):
    assert poly_eval(poly_mul(p, q), x) == poly_eval(p, x) * poly_eval(q, x)


@given(small_polys, st.fractions(min_value=-3, max_value=3, max_denominator=9),
       st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_taylor_shift(p, x0, e):
    assert poly_eval(taylor_shift(p, x0), e) == poly_eval(p, x0 + e)


@given(small_polys, st.integers(min_value=-5, max_value=5), st.integers(min_value=0, max_value=30))
def test_power_sum_matches_loop(p, lo, length):
    hi = lo + length
    assert power_sum(p, lo, hi) == sum(poly_eval(p, Fraction(n)) for n in range(lo, hi + 1))


def test_power_sum_empty_range():
    assert power_sum((1, 1), 5, 4) == 0


def test_root_bound():
    assert root_bound((2, 3, 1)) == pytest.approx(-1.0)
    assert root_bound((1, 0, 1)) == pytest.approx(1.0)
    assert root_bound((3,)) == -math.inf


def test_series_exp_and_log():
    order = 8
    e = series_exp([0, 1], order)
    assert np.allclose(e, [1 / math.factorial(k) for k in range(order)])
    assert np.allclose(series_log(e, order), [0, 1] + [0] * (order - 2), atol=1e-14)
    assert np.allclose(exp_linear_series(1, order), e)


def test_series_reciprocal():
    order = 6
    a = np.array([1, -1], dtype=complex)
    assert np.allclose(series_reciprocal(a, order), np.ones(order))
    assert np.allclose(series_mul(a, series_reciprocal(a, order), order), [1] + [0] * (order - 1))


def test_series_log_needs_nonzero_constant():
    with pytest.raises(DomainError):
        series_log([0, 1], 4)

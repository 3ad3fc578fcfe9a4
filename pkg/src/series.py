"""
Truncated power series and exact polynomial helpers.

Float/complex series are numpy arrays of Taylor coefficients [c_0, c_1, ...].
Exact polynomials are tuples of Fractions in ascending powers.
"""
from fractions import Fraction
from math import comb
from typing import Sequence, Tuple

import numpy as np

from src.errors import DomainError

Poly = Tuple[Fraction, ...]


# ---------- Exact polynomials ----------
def poly_trim(coeffs: Sequence) -> Poly:
    out = [Fraction(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out) if out else (Fraction(0),)


def poly_degree(coeffs: Sequence) -> int:
    p = poly_trim(coeffs)
    if len(p) == 1 and p[0] == 0:
        return -1
    return len(p) - 1


def poly_eval(coeffs: Sequence, x):
    """Horner evaluation; exact when coeffs and x are rational."""
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def poly_scale(p: Sequence, c) -> Poly:
    return poly_trim([c * x for x in p])


def poly_mul(p: Sequence, q: Sequence) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_pow(p: Sequence, n: int) -> Poly:
    out: Poly = (Fraction(1),)
    for _ in range(n):
        out = poly_mul(out, p)
    return out


def poly_derivative(p: Sequence) -> Poly:
    return poly_trim([k * p[k] for k in range(1, len(p))] or [0])


def taylor_shift(p: Sequence, x0) -> Poly:
    """Coefficients of P(x0 + e) in powers of e."""
    n = len(p)
    return poly_trim([
        sum(Fraction(p[i]) * comb(i, j) * Fraction(x0) ** (i - j) for i in range(j, n))
        for j in range(n)
    ])


def is_even_poly(p: Sequence) -> bool:
    return all(c == 0 for k, c in enumerate(p) if k % 2 == 1)


def float_roots(p: Sequence) -> np.ndarray:
    """Complex roots of an exact polynomial (empty for constants)."""
    p = poly_trim(p)
    if len(p) <= 1:
        return np.array([], dtype=complex)
    return np.roots([float(c) for c in reversed(p)])


def root_bound(p: Sequence) -> float:
    """Largest Re(z) + |Im(z)| over the roots; -inf when there are none."""
    roots = float_roots(p)
    if roots.size == 0:
        return float("-inf")
    return float(np.max(roots.real + np.abs(roots.imag)))


def power_sum(p: Sequence, lo: int, hi: int) -> Fraction:
    """Exact sum of P(n) for lo <= n <= hi via Faulhaber through Bernoulli polynomials."""
    from src.specfun import bernoulli_polynomial

    if hi < lo:
        return Fraction(0)
    total = Fraction(0)
    for k, c in enumerate(p):
        if c == 0:
            continue
        total += Fraction(c) * (
            bernoulli_polynomial(k + 1, Fraction(hi + 1)) - bernoulli_polynomial(k + 1, Fraction(lo))
        ) / (k + 1)
    return total


# ---------- Truncated power series ----------
def _padded(a, order: int) -> np.ndarray:
    a = np.asarray(a, dtype=complex)[:order]
    if len(a) < order:
        a = np.concatenate([a, np.zeros(order - len(a), dtype=complex)])
    return a


def series_mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    return np.convolve(_padded(a, order), _padded(b, order))[:order]


def series_exp(a: np.ndarray, order: int) -> np.ndarray:
    a = _padded(a, order)
    b = np.zeros(order, dtype=complex)
    b[0] = np.exp(a[0])
    for n in range(1, order):
        k = np.arange(1, n + 1)
        b[n] = np.sum(k * a[k] * b[n - k]) / n
    return b


def series_log(a: np.ndarray, order: int) -> np.ndarray:
    a = _padded(a, order)
    if a[0] == 0:
        raise DomainError("series_log needs a non-zero constant term", field="a")
    b = np.zeros(order, dtype=complex)
    b[0] = np.log(a[0])
    for n in range(1, order):
        k = np.arange(1, n)
        b[n] = (a[n] - np.sum(k * b[k] * a[n - k]) / n) / a[0]
    return b


def series_pow(a: np.ndarray, p: complex, order: int) -> np.ndarray:
    """a**p with the principal branch at the constant term."""
    return series_exp(p * series_log(a, order), order)


def series_reciprocal(a: np.ndarray, order: int) -> np.ndarray:
    return series_pow(a, -1, order)


def exp_linear_series(c: complex, order: int) -> np.ndarray:
    """Taylor coefficients of exp(c e)."""
    out = np.ones(order, dtype=complex)
    for k in range(1, order):
        out[k] = out[k - 1] * c / k
    return out

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy import special

from src import config
from src.errors import DomainError, PoleAt, TolError

Number = Union[int, float, complex, Fraction]


def _is_nonpositive_integer(s: complex) -> bool:
    s = complex(s)
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


# ---------- Gamma ----------
def gamma(s: Number) -> complex:
    """
    Euler Gamma function for complex argument.
    @param s: complex. Argument; raises PoleAt on 0, -1, -2, ...
    """
    z = complex(s)
    if _is_nonpositive_integer(z):
        raise PoleAt(int(z.real))
    if z.imag == 0:
        return complex(special.gamma(z.real))
    return complex(special.gamma(z))


def log_gamma_abs(s: complex) -> float:
    """log|Gamma(s)| without overflow."""
    z = complex(s)
    if _is_nonpositive_integer(z):
        raise PoleAt(int(z.real))
    return float(special.loggamma(z).real)


def gamma_residue(n: int) -> Fraction:
    """Residue of Gamma at -n: (-1)^n / n!."""
    if n < 0:
        raise DomainError(f"gamma_residue needs n >= 0, got {n}", field="n")
    return Fraction((-1) ** n, math.factorial(n))


def gamma_taylor_at_zero(order: int) -> np.ndarray:
    """Taylor coefficients of Gamma(1 + e) = exp(-gamma e + sum_k (-1)^k zeta(k) e^k / k)."""
    from src.series import series_exp

    logs = np.zeros(order, dtype=complex)
    if order > 1:
        logs[1] = -np.euler_gamma
    for k in range(2, order):
        logs[k] = (-1) ** k * riemann_zeta(k).real / k
    return series_exp(logs, order)


# ---------- Bernoulli ----------
@lru_cache(maxsize=None)
def _bernoulli_table(size: int) -> Tuple[Fraction, ...]:
    # Akiyama-Tanigawa; yields B_1 = +1/2.
    a = [Fraction(0)] * size
    out = []
    for m in range(size):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return tuple(out)


def bernoulli_number(n: int) -> Fraction:
    """
    Exact Bernoulli number with the B_1 = +1/2 convention.
    @param n: int. Index n >= 0.
    """
    if n < 0:
        raise DomainError(f"bernoulli_number needs n >= 0, got {n}", field="n")
    size = 32 * (n // 32 + 1)
    return _bernoulli_table(size)[n]


def bernoulli_even_lower_bound(n: int) -> float:
    """2 (2n)! / (2 pi)^{2n}, a strict lower bound for |B_{2n}|; the ratio tends to 1."""
    if n < 1:
        raise DomainError(f"bernoulli_even_lower_bound needs n >= 1, got {n}", field="n")
    return math.exp(math.log(2) + special.gammaln(2 * n + 1) - 2 * n * math.log(2 * math.pi))


def bernoulli_polynomial(n: int, x: Number):
    """B_n(x); exact for rational x, float otherwise. B_n(1) equals bernoulli_number(n)."""
    if n < 0:
        raise DomainError(f"bernoulli_polynomial needs n >= 0, got {n}", field="n")
    exact = isinstance(x, (int, Fraction))
    xv = Fraction(x) if exact else x
    total = Fraction(0) if exact else 0.0
    for k in range(n + 1):
        bk = bernoulli_number(k) if k != 1 else Fraction(-1, 2)
        coeff = math.comb(n, k) * bk
        total += (coeff if exact else float(coeff)) * xv ** (n - k)
    return total


def bernoulli_polynomial_coeffs(n: int) -> Tuple[Fraction, ...]:
    """Coefficients of B_n(x), constant term first."""
    if n < 0:
        raise DomainError(f"bernoulli_polynomial_coeffs needs n >= 0, got {n}", field="n")
    coeffs = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        bk = bernoulli_number(k) if k != 1 else Fraction(-1, 2)
        coeffs[n - k] = math.comb(n, k) * bk
    return tuple(coeffs)


# ---------- Eulerian ----------
@lru_cache(maxsize=None)
def eulerian_row(j: int) -> Tuple[int, ...]:
    if j < 0:
        raise DomainError(f"eulerian_row needs j >= 0, got {j}", field="j")
    row = [1]
    for m in range(1, j + 1):
        prev = row + [0]
        row = [(k + 1) * prev[k] + (m - k) * (prev[k - 1] if k > 0 else 0) for k in range(m)]
    return tuple(row)


def eulerian_number(j: int, k: int) -> int:
    """Number of permutations of j letters with k descents."""
    if j < 0 or k < 0:
        raise DomainError(f"eulerian_number needs j, k >= 0, got ({j}, {k})", field="k")
    row = eulerian_row(j)
    return row[k] if k < len(row) else 0


# ---------- Hurwitz / Riemann zeta ----------
def _cos_scaled(z: complex) -> complex:
    """cos(z) exp(-|Im z|), finite for any z."""
    y = abs(z.imag)
    return 0.5 * (cmath.exp(1j * z - y) + cmath.exp(-1j * z - y))


def _sin_scaled(z: complex) -> complex:
    """sin(z) exp(-|Im z|)."""
    y = abs(z.imag)
    return (cmath.exp(1j * z - y) - cmath.exp(-1j * z - y)) / 2j


def _hurwitz_euler_maclaurin(s: complex, alpha: float) -> complex:
    n_head = max(config.HURWITZ_MIN_HEAD, int(math.ceil(abs(s))), int(math.ceil(abs(s.imag) / 2)))
    k = np.arange(n_head, dtype=float) + alpha
    head = complex(np.sum(np.exp(-s * np.log(k))))
    x = n_head + alpha
    x_s = cmath.exp(-s * math.log(x))
    tail = x * x_s / (s - 1) + 0.5 * x_s
    term = s * x_s / x
    for j in range(1, config.HURWITZ_EM_ORDER + 1):
        tail += float(bernoulli_number(2 * j)) / math.factorial(2 * j) * term
        term *= (s + 2 * j - 1) * (s + 2 * j) / (x * x)
    return head + tail


def _hurwitz_reflected(s: complex, alpha: Fraction) -> complex:
    # alpha = p/q in (0, 1]; Hurwitz functional equation at 1 - s.
    p, q = alpha.numerator, alpha.denominator
    w = 1 - s
    total = 0j
    for m in range(1, q + 1):
        total += _cos_scaled(math.pi * w / 2 - 2 * math.pi * m * p / q) * _hurwitz_euler_maclaurin(w, m / q)
    log_factor = math.log(2) + complex(special.loggamma(w)) - w * math.log(2 * math.pi * q) + math.pi * abs(w.imag) / 2
    return cmath.exp(log_factor) * total


def _hurwitz_recentred(s: complex, alpha: float) -> complex:
    # Move alpha into [1, 2), then Taylor-expand around the nearest quarter, whose values reflect exactly.
    n = math.floor(alpha)
    if n == 0:
        base = alpha + 1
        correction = -cmath.exp(-s * math.log(alpha))
    else:
        base = alpha - (n - 1)
        correction = sum(cmath.exp(-s * math.log(base + i)) for i in range(n - 1))
    anchor = Fraction(round(4 * base), 4)
    delta = base - float(anchor)
    total = 0j
    weight = complex(1)
    small = 0
    for k in range(config.HURWITZ_TAYLOR_TERMS):
        if weight == 0:
            break
        term = weight * hurwitz_zeta(s + k, anchor)
        total += term
        if k > 0 and abs(term) <= 1e-17 * max(abs(total), 1e-300):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        weight *= (-s - k) / (k + 1) * delta
    else:
        raise TolError(f"hurwitz_zeta Taylor series at s = {s} did not settle", field="alpha")
    return total - correction


def hurwitz_zeta(s: Number, alpha: Number) -> complex:
    """
    Hurwitz zeta sum_{k>=0} (k + alpha)^{-s}, continued to s != 1.
    @param s: complex. Argument.
    @param alpha: float or Fraction. Offset, alpha > 0.
    """
    z = complex(s)
    if z == 1:
        raise PoleAt(1)
    if isinstance(alpha, complex) or float(alpha) <= 0:
        raise DomainError(f"hurwitz_zeta needs alpha > 0, got {alpha}", field="alpha")
    if _is_nonpositive_integer(z) and isinstance(alpha, (int, Fraction)):
        return complex(float(hurwitz_zeta_nonpositive(int(-z.real), Fraction(alpha))))
    if z.real < 0:
        if isinstance(alpha, (int, Fraction)) and Fraction(alpha).denominator <= config.HURWITZ_MAX_DENOMINATOR:
            a = Fraction(alpha)
            shift = math.ceil(a) - 1
            base = a - shift
            correction = sum(cmath.exp(-z * math.log(base + i)) for i in range(shift))
            return _hurwitz_reflected(z, base) - correction
        return _hurwitz_recentred(z, float(alpha))
    return _hurwitz_euler_maclaurin(z, float(alpha))


def hurwitz_zeta_nonpositive(n: int, alpha: Fraction) -> Fraction:
    """Exact value zeta_H(-n, alpha) = -B_{n+1}(alpha) / (n + 1)."""
    return -bernoulli_polynomial(n + 1, Fraction(alpha)) / (n + 1)


def riemann_zeta(s: Number) -> complex:
    """Riemann zeta; exact Bernoulli values at non-positive integers."""
    z = complex(s)
    if z == 1:
        raise PoleAt(1)
    if _is_nonpositive_integer(z):
        return complex(float(riemann_zeta_nonpositive(int(-z.real))))
    if z.real >= 0.5:
        return _hurwitz_euler_maclaurin(z, 1.0)
    w = 1 - z
    log_factor = z * math.log(2) + (z - 1) * math.log(math.pi) + complex(special.loggamma(w)) + math.pi * abs(z.imag) / 2
    return cmath.exp(log_factor) * _sin_scaled(math.pi * z / 2) * _hurwitz_euler_maclaurin(w, 1.0)


def riemann_zeta_nonpositive(n: int) -> Fraction:
    return -bernoulli_number(n + 1) / (n + 1)


# ---------- Theta ----------
def _theta(q: float, sign: int) -> float:
    if not 0 < q < 1:
        raise DomainError(f"theta needs 0 < q < 1, got {q}", field="q")
    total = 0.0
    n = 1
    while True:
        term = q ** (n * n)
        total += sign ** n * term
        if term < config.THETA_TAIL * (1 - q):
            break
        n += 1
    return 1.0 + 2.0 * total


def theta3(q: float) -> float:
    """Jacobi theta_3: sum over all integers n of q^{n^2}."""
    return _theta(q, 1)


def theta4(q: float) -> float:
    """Jacobi theta_4: sum over all integers n of (-1)^n q^{n^2}."""
    return _theta(q, -1)


# ---------- Binomial ----------
def rising_factorial(s: Number, j: int):
    """s (s + 1) ... (s + j - 1); exact for rational s."""
    if j < 0:
        raise DomainError(f"rising_factorial needs j >= 0, got {j}", field="j")
    out = Fraction(1) if isinstance(s, (int, Fraction)) else complex(1)
    for l in range(j):
        out *= (s + l)
    return out


def binomial(s: Number, j: int):
    """Generalised binomial s(s-1)...(s-j+1)/j!; exact for rational s."""
    if j < 0:
        raise DomainError(f"binomial needs j >= 0, got {j}", field="j")
    if isinstance(s, (int, Fraction)):
        out = Fraction(1)
        for l in range(j):
            out *= Fraction(s - l, l + 1)
        return out
    # one factor per step; the split numerator and j! overflow a float past j = 170
    out = complex(1)
    for l in range(j):
        out *= (s - l) / (l + 1)
    return out

"""Gamma, digamma, Pochhammer and the Gauss hypergeometric function 2F1.

Real arguments only. ``hyp2f1`` sums the power series for ``|u| <= 0.99``,
uses Gauss's closed form at ``u = 1`` and the ``1 - u`` connection formulas on
``(0.99, 1)`` where the plain series would need far more than the term cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DivergenceError, DomainError, PoleError

MAX_TERMS = 20000
SERIES_RTOL = 1e-16
# above this |u| the direct series is replaced by the 1-u expansion
NEAR_ONE = 0.99
# c - a - b closer than this to an integer uses the logarithmic formulas
INTEGER_TOL = 1e-9

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma(z: float) -> float:
    """Gamma function via the Lanczos approximation (g=7, 9 terms).

    Uses the reflection formula below 1/2. Raises ``PoleError`` at
    0, -1, -2, ...
    """
    z = float(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"gamma has a pole at z={z}")
    if z < 0.5:
        return math.pi / (math.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power to delay overflow for large z
    half = t ** ((z + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * math.exp(-t) * half * acc


def rgamma(z: float) -> float:
    """Reciprocal gamma, zero at the poles."""
    if _is_nonpositive_integer(z):
        return 0.0
    return 1.0 / gamma(z)


def digamma(x: float) -> float:
    """Logarithmic derivative of gamma for real ``x``."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma has a pole at x={x}")
    if x < 0.5:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (
        1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))))
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(p: float, k: int) -> float:
    """Rising factorial (p)_k = p (p+1) ... (p+k-1); (p)_0 = 1."""
    if k < 0 or int(k) != k:
        raise DomainError(f"pochhammer needs a non-negative integer k, got {k}")
    out = 1.0
    for j in range(int(k)):
        out *= p + j
    return out


@dataclass(frozen=True)
class HypergeomParams:
    """Parameters (a, b; c) of 2F1(a, b; c; u)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise PoleError(f"2F1 lower parameter c={self.c} is a pole")

    def shifted(self, k: int = 1) -> "HypergeomParams":
        return HypergeomParams(self.a + k, self.b + k, self.c + k)


def _terminating_degree(a: float, b: float) -> int | None:
    degs = [int(-p) for p in (a, b) if _is_nonpositive_integer(p)]
    return min(degs) if degs else None


def _polynomial(a: float, b: float, c: float, u: float, degree: int) -> float:
    term = 1.0
    total = 1.0
    for k in range(degree):
        term *= (a + k) * (b + k) / ((k + 1) * (c + k)) * u
        total += term
    return total


def _series(a: float, b: float, c: float, u: float) -> float:
    term = 1.0
    total = 1.0
    for k in range(MAX_TERMS):
        term *= (a + k) * (b + k) / ((k + 1) * (c + k)) * u
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {u}) did not converge in {MAX_TERMS} terms")


def _log_series(coef0, shift_a, shift_b, m, a, b, w, lw, sign_psi):
    """Shared infinite sum of the integer-(c-a-b) connection formulas."""
    term = coef0
    total = 0.0
    for k in range(MAX_TERMS):
        bracket = (lw - digamma(k + 1) - digamma(k + m + 1)
                   + digamma(a + k + shift_a) + digamma(b + k + shift_b))
        piece = term * sign_psi * bracket
        total += piece
        if k > 2 and abs(piece) < SERIES_RTOL * abs(total):
            return total
        term *= (a + shift_a + k) * (b + shift_b + k) / ((k + 1) * (k + m + 1)) * w
    raise ConvergenceError("logarithmic 2F1 expansion did not converge")


def _near_one(a: float, b: float, c: float, u: float) -> float:
    w = 1.0 - u
    m_real = c - a - b
    m = round(m_real)
    if abs(m_real - m) > INTEGER_TOL:
        first = gamma(c) * gamma(m_real) * rgamma(c - a) * rgamma(c - b)
        second = gamma(c) * gamma(-m_real) * rgamma(a) * rgamma(b)
        out = 0.0
        if first != 0.0:
            out += first * _series(a, b, 1.0 - m_real, w)
        if second != 0.0:
            out += second * w ** m_real * _series(c - a, c - b, 1.0 + m_real, w)
        return out

    lw = math.log(w)
    if m == 0:
        pref = gamma(a + b) * rgamma(a) * rgamma(b)
        term = 1.0
        total = 0.0
        for k in range(MAX_TERMS):
            bracket = 2.0 * digamma(k + 1) - digamma(a + k) - digamma(b + k) - lw
            piece = term * bracket
            total += piece
            if k > 2 and abs(piece) < SERIES_RTOL * abs(total):
                return pref * total
            term *= (a + k) * (b + k) / ((k + 1) ** 2) * w
        raise ConvergenceError("logarithmic 2F1 expansion did not converge")

    if m > 0:
        finite = 0.0
        term = 1.0
        for k in range(m):
            finite += term
            if k + 1 < m:
                term *= (a + k) * (b + k) / ((k + 1) * (1 - m + k)) * w
        finite *= gamma(m) * gamma(c) * rgamma(a + m) * rgamma(b + m)
        pref = gamma(c) * rgamma(a) * rgamma(b)
        if pref == 0.0:
            return finite
        infinite = _log_series(1.0 / math.factorial(m), m, m, m, a, b, w, lw, 1.0)
        return finite - (-w) ** m * pref * infinite

    mp = -m
    finite = 0.0
    term = 1.0
    for k in range(mp):
        finite += term
        if k + 1 < mp:
            term *= (a - mp + k) * (b - mp + k) / ((k + 1) * (1 - mp + k)) * w
    finite *= gamma(mp) * gamma(c) * rgamma(a) * rgamma(b) * w ** (-mp)
    pref = gamma(c) * rgamma(a - mp) * rgamma(b - mp)
    if pref == 0.0:
        return finite
    infinite = _log_series(1.0 / math.factorial(mp), 0, 0, mp, a, b, w, lw, 1.0)
    return finite - (-1) ** mp * pref * infinite


def gauss_value_at_one(params: HypergeomParams) -> float:
    """Gauss's summation 2F1(a, b; c; 1) = G(c) G(c-a-b) / (G(c-a) G(c-b))."""
    a, b, c = params.a, params.b, params.c
    if c - a - b <= 0:
        raise DivergenceError(f"2F1 diverges at u=1 when c-a-b={c - a - b} <= 0")
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)


def hyp2f1(params: HypergeomParams, u: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; u) for real ``u``.

    Terminating series (``a`` or ``b`` a non-positive integer) are summed
    exactly for any ``u``. Otherwise ``|u| <= 1`` is required, and at ``u = 1``
    only Gauss's theorem is used (``c - a - b > 0`` or ``DivergenceError``).
    """
    a, b, c = params.a, params.b, params.c
    u = float(u)
    if u == 0.0:
        return 1.0
    degree = _terminating_degree(a, b)
    if degree is not None:
        return _polynomial(a, b, c, u, degree)
    if abs(u) > 1.0:
        raise DomainError(f"2F1 series needs |u| <= 1, got u={u}")
    if u == 1.0:
        return gauss_value_at_one(params)
    if u < -0.5:
        # Pfaff: maps [-1, -0.5) into [1/3, 1/2]
        return (1.0 - u) ** (-a) * hyp2f1(HypergeomParams(a, c - b, c), u / (u - 1.0))
    if u > NEAR_ONE:
        return _near_one(a, b, c, u)
    return _series(a, b, c, u)


def hyp2f1_derivative(params: HypergeomParams, u: float) -> float:
    """d/du 2F1(a, b; c; u) = (ab/c) 2F1(a+1, b+1; c+1; u)."""
    scale = params.a * params.b / params.c
    if scale == 0.0:
        return 0.0
    return scale * hyp2f1(params.shifted(1), u)


def hyp2f1_second_derivative(params: HypergeomParams, u: float) -> float:
    a, b, c = params.a, params.b, params.c
    scale = a * b * (a + 1) * (b + 1) / (c * (c + 1))
    if scale == 0.0:
        return 0.0
    return scale * hyp2f1(params.shifted(2), u)

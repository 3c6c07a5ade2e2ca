"""Closed-form regularized potentials of the unit ball.

``V(t)`` is the regularized potential of the unit ball B^n at ``t e_1``:

* ``|t| < 1``: ``(sigma/lam) 2F1(-lam/2, (n-lam)/2; n/2; t^2)``
* ``|t| > 1``: ``(sigma/n) t^(lam-n) 2F1(1-lam/2, (n-lam)/2; n/2+1; 1/t^2)``
* ``|t| = 1``, ``lam > 0``: a ratio of gamma functions
* ``lam = 0``: explicit logarithmic formulas

with ``sigma`` the area of S^(n-1). Negative ``t`` uses ``V(-t) = V(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BoundaryPointError, DomainError
from .quadrature import sphere_area
from .specfun import (
    HypergeomParams,
    gamma,
    hyp2f1,
    hyp2f1_derivative,
    hyp2f1_second_derivative,
    pochhammer,
)

# |t| within this band of 1 is treated as a boundary point
BOUNDARY_BAND = 1e-8
LOG_STEP = 1e-5

__all__ = [
    "BallPotentialQuery",
    "ElementaryForm",
    "ball_potential",
    "ball_potential_derivative",
    "ball_potential_second_derivative",
    "ball_v_hat",
    "elementary_form",
    "log_potential_ball",
    "ode_residual",
    "reflect_in_lambda",
    "reflect_in_t",
    "sphere_area",
]


@dataclass(frozen=True)
class BallPotentialQuery:
    n: int
    lam: float
    t: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"ball dimension must be an integer >= 2, got {self.n}")
        if not (math.isfinite(self.lam) and math.isfinite(self.t)):
            raise DomainError("lambda and t must be finite")
        if self.on_boundary and self.lam <= 0:
            raise BoundaryPointError(
                f"no regularized value on the sphere |t|=1 for lambda={self.lam} <= 0")

    @property
    def on_boundary(self) -> bool:
        return abs(abs(self.t) - 1.0) < BOUNDARY_BAND

    @property
    def sigma(self) -> float:
        return sphere_area(self.n)

    def value(self) -> float:
        return ball_potential(self.n, self.lam, self.t)


def _inner_params(n: int, lam: float) -> HypergeomParams:
    return HypergeomParams(-lam / 2.0, (n - lam) / 2.0, n / 2.0)


def _outer_params(n: int, lam: float) -> HypergeomParams:
    return HypergeomParams(1.0 - lam / 2.0, (n - lam) / 2.0, n / 2.0 + 1.0)


def _boundary_value(n: int, lam: float) -> float:
    return (2.0 ** lam / lam) * gamma((lam + 1) / 2.0) / gamma((lam + n) / 2.0) * math.pi ** ((n - 1) / 2.0)


def _log_outer_sum(n: int, s: float) -> float:
    """V^0(s)/sigma for s > 1."""
    if n % 2:
        tail = sum(s ** (-2 * j + 1) / (2 * j - 1) for j in range(1, (n - 1) // 2 + 1))
        return 0.5 * math.log((s + 1.0) / (s - 1.0)) - tail
    tail = sum(s ** (-2 * j) / (2 * j) for j in range(1, n // 2))
    return -0.5 * math.log1p(-1.0 / (s * s)) - tail


def ball_potential(n: int, lam: float, t: float) -> float:
    """Regularized potential V^(lam) of the unit ball B^n at ``t e_1``."""
    q = BallPotentialQuery(n, lam, t)
    s = abs(float(t))
    sigma = q.sigma
    if q.on_boundary:
        return _boundary_value(n, lam)
    if lam == 0:
        if s < 1:
            return sigma * 0.5 * math.log1p(-s * s)
        return sigma * _log_outer_sum(n, s)
    if s < 1:
        return sigma / lam * hyp2f1(_inner_params(n, lam), s * s)
    return sigma / n * s ** (lam - n) * hyp2f1(_outer_params(n, lam), 1.0 / (s * s))


def _derivatives(n: int, lam: float, s: float) -> tuple[float, float]:
    """(V'(s), V''(s)) for s >= 0 off the unit sphere."""
    sigma = sphere_area(n)
    if lam == 0:
        if s < 1:
            w = 1.0 - s * s
            return -sigma * s / w, -sigma * (1.0 + s * s) / (w * w)
        den = s ** (n + 1) - s ** (n - 1)
        num = (n + 1) * s ** n - (n - 1) * s ** (n - 2)
        return -sigma / den, sigma * num / (den * den)
    if s < 1:
        p = _inner_params(n, lam)
        u = s * s
        a = sigma / lam
        d1 = hyp2f1_derivative(p, u)
        d2 = hyp2f1_second_derivative(p, u)
        return a * 2.0 * s * d1, a * (4.0 * u * d2 + 2.0 * d1)
    p = _outer_params(n, lam)
    u = 1.0 / (s * s)
    b = sigma / n
    m = lam - n
    g0 = hyp2f1(p, u)
    g1 = hyp2f1_derivative(p, u)
    g2 = hyp2f1_second_derivative(p, u)
    first = b * (m * s ** (m - 1) * g0 - 2.0 * s ** (m - 3) * g1)
    second = b * (m * (m - 1) * s ** (m - 2) * g0 - (4 * m - 6) * s ** (m - 4) * g1 + 4.0 * s ** (m - 6) * g2)
    return first, second


def _check_off_sphere(n, lam, t):
    q = BallPotentialQuery(n, lam, t)
    if q.on_boundary:
        raise DomainError(f"closed-form derivatives are not available at |t|=1 (t={t})")


def ball_potential_derivative(n: int, lam: float, t: float) -> float:
    """dV/dt by differentiating the closed form in force at ``t``."""
    _check_off_sphere(n, lam, t)
    d1, _ = _derivatives(n, lam, abs(float(t)))
    return d1 if t >= 0 else -d1


def ball_potential_second_derivative(n: int, lam: float, t: float) -> float:
    _check_off_sphere(n, lam, t)
    return _derivatives(n, lam, abs(float(t)))[1]


def reflect_in_t(n: int, lam: float, t: float) -> float:
    """V(t) through the values of V and V' at 1/t."""
    if lam == 0:
        raise DomainError("t-reflection needs lambda != 0")
    s = abs(float(t))
    if s == 0 or abs(s - 1.0) < BOUNDARY_BAND:
        raise DomainError(f"t-reflection is undefined at t={t}")
    inv = 1.0 / s
    return s ** (lam - n) * (ball_potential(n, lam, inv)
                             + (s - inv) / lam * ball_potential_derivative(n, lam, inv))


def reflect_in_lambda(n: int, lam: float, t: float) -> float:
    """V^(lam)(t) through V^(-lam)(t)."""
    if lam == 0:
        raise DomainError("lambda-reflection needs lambda != 0")
    s = abs(float(t))
    if abs(s - 1.0) < BOUNDARY_BAND:
        raise DomainError("lambda-reflection is undefined on the unit sphere")
    other = ball_potential(n, -lam, s)
    if s < 1:
        return -((1.0 - s * s) ** lam) * other
    return (s * s - 1.0) ** lam * other


def ode_residual(n: int, lam: float, t: float) -> float:
    """t(1-t^2)V'' + (n-1+(2 lam-n-1)t^2)V' - lam(lam-n) t V."""
    if lam == 0:
        raise DomainError("the ODE residual is defined for lambda != 0")
    v = ball_potential(n, lam, t)
    d1 = ball_potential_derivative(n, lam, t)
    d2 = ball_potential_second_derivative(n, lam, t)
    return t * (1 - t * t) * d2 + (n - 1 + (2 * lam - n - 1) * t * t) * d1 - lam * (lam - n) * t * v


def log_potential_ball(n: int, t: float, h: float = LOG_STEP) -> float:
    """Log potential of the unit ball: minus the lambda-derivative of V at lambda = n.

    Central differences with steps ``h`` and ``h/2`` combined by Richardson
    extrapolation.
    """
    def diff(step):
        return -(ball_potential(n, n + step, t) - ball_potential(n, n - step, t)) / (2.0 * step)

    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0


def ball_v_hat(n: int, lam: float, t: float) -> float:
    """Normalized potential V/(n - lam); the log potential at lam = n."""
    if lam == n:
        return log_potential_ball(n, t)
    return ball_potential(n, lam, t) / (n - lam)


@dataclass(frozen=True)
class ElementaryForm:
    kind: str
    value: float


def _is_int(x: float) -> bool:
    return float(x).is_integer()


def _finite_2f1(p: HypergeomParams, u: float) -> float:
    """Terminating 2F1 summed term by term from Pochhammer symbols."""
    deg = min(int(-x) for x in (p.a, p.b) if x <= 0 and _is_int(x))
    return sum(pochhammer(p.a, k) * pochhammer(p.b, k) / (math.factorial(k) * pochhammer(p.c, k)) * u ** k
               for k in range(deg + 1))


def _terminates(p: HypergeomParams) -> bool:
    return any(x <= 0 and _is_int(x) for x in (p.a, p.b))


def elementary_form(n: int, lam: float, t: float) -> ElementaryForm | None:
    """Evaluate V through an elementary expression when one is available.

    Covered: ``lam = 0`` (logarithms), and every case where the
    hypergeometric series terminates (``lam`` a positive even integer, or
    ``lam - n`` a non-negative even integer), directly or after the
    lambda-reflection (``lam`` a negative even integer). Returns ``None``
    otherwise.
    """
    q = BallPotentialQuery(n, lam, t)
    s = abs(float(t))
    sigma = q.sigma
    if lam == 0:
        if s < 1:
            return ElementaryForm("log form", sigma * 0.5 * math.log1p(-s * s))
        parity = "odd" if n % 2 else "even"
        return ElementaryForm(f"{parity}-n log form", sigma * _log_outer_sum(n, s))

    def direct(lam_: float) -> tuple[str, float] | None:
        if s <= 1:
            p = _inner_params(n, lam_)
            if _terminates(p):
                return "polynomial in t^2", sigma / lam_ * _finite_2f1(p, s * s)
            return None
        p = _outer_params(n, lam_)
        if _terminates(p):
            return "t^(lambda-n) times a polynomial in 1/t^2", \
                sigma / n * s ** (lam_ - n) * _finite_2f1(p, 1.0 / (s * s))
        return None

    got = direct(lam)
    if got is not None:
        return ElementaryForm(*got)
    if lam < 0 and not q.on_boundary:
        got = direct(-lam)
        if got is not None:
            factor = -((1.0 - s * s) ** lam) if s < 1 else (s * s - 1.0) ** lam
            return ElementaryForm(f"rational via lambda-reflection ({got[0]})", factor * got[1])
    return None

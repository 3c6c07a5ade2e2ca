"""Regularized Riesz potentials of CSG shapes by polar integration.

For a point ``x`` and a unit direction ``d`` the body meets the ray
``x + r d`` in intervals ``[b, c]``. The radial integral of
``r^(lam-n) r^(n-1)`` over one interval has the primitive ``r^lam / lam``
(``log r`` at ``lam = 0``). When the ray starts inside the body (``b = 0``)
and ``lam <= 0`` the lower-limit term is dropped; that is exactly the
Hadamard finite part of the divergent integral, so regularization adds no
error beyond the angular quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryPointError, DomainError
from .intervals import IntervalBatch, IntervalSet
from .quadrature import SphereQuadrature, default_rule, quadrature_error
from .shapes import Shape, _vec

INTERIOR_TOL = 1e-9
WORLD_RADIUS = 1e6
# rays per interval-evaluation chunk; bounds peak memory for large rules
CHUNK = 65536


@dataclass(frozen=True)
class PotentialValue:
    value: float
    regularized: bool
    quadrature_size: int
    error: float = 0.0


def _primitive_diff(lo: np.ndarray, hi: np.ndarray, p: float, drop_zero: bool) -> np.ndarray:
    """Sum over intervals of the integral of r^(p-1) from lo to hi.

    ``drop_zero`` removes the lower-limit term when ``lo == 0``.
    """
    valid = np.isfinite(lo)
    hi = np.where(valid, hi, 1.0)
    lo_safe = np.where(valid & (lo > 0), lo, 1.0)
    at_zero = valid & (lo <= 0)
    if p == 0:
        upper = np.log(hi)
        lower = np.log(lo_safe)
    else:
        upper = hi ** p / p
        lower = lo_safe ** p / p
    if drop_zero:
        lower = np.where(at_zero, 0.0, lower)
    elif p > 0:
        lower = np.where(at_zero, 0.0, lower)
    else:
        lower = np.where(at_zero, -np.inf if p == 0 else np.inf, lower)
    return np.where(valid, upper - lower, 0.0).sum(axis=1)


def _log_primitive(r: np.ndarray, n: int) -> np.ndarray:
    """F(r) = r^n log(1/r)/n + r^n/n^2, the primitive of r^(n-1) log(1/r)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        rn = r ** n
        out = -rn * np.log(r) / n + rn / (n * n)
    return np.where(r > 0, out, 0.0)


def batch_contributions(batch: IntervalBatch, lam: float, log_mode: bool = False, n: int | None = None) -> np.ndarray:
    """Per-ray radial integrals for a whole batch."""
    if batch.lo.shape[1] == 0:
        return np.zeros(batch.n_rays)
    if log_mode:
        if n is None:
            raise DomainError("log-mode contributions need the dimension n")
        valid = batch.valid
        lo = np.where(valid, batch.lo, 0.0)
        hi = np.where(valid, batch.hi, 0.0)
        return (_log_primitive(hi, n) - _log_primitive(lo, n)).sum(axis=1)
    return _primitive_diff(batch.lo, batch.hi, lam, drop_zero=True)


def ray_contribution(intervals: IntervalSet, lam: float, log_mode: bool = False, n: int | None = None) -> float:
    """Radial integral over one ray's interval set.

    Each ``[b, c]`` contributes ``(c^lam - b^lam)/lam`` (``log(c/b)`` at
    ``lam = 0``); the ``b = 0`` term is dropped. ``log_mode`` integrates
    ``r^(n-1) log(1/r)`` instead.
    """
    if log_mode and lam <= 0:
        raise DomainError("log mode is only defined for the lambda = n > 0 normalization")
    return float(batch_contributions(intervals.to_batch(), lam, log_mode, n)[0])


def _rays(shape: Shape, x: np.ndarray, quad: SphereQuadrature):
    """Yield (slice, IntervalBatch) over the rule's directions."""
    d = quad.directions
    for s in range(0, d.shape[0], CHUNK):
        dd = d[s : s + CHUNK]
        yield slice(s, s + dd.shape[0]), shape.intervals(np.broadcast_to(x, dd.shape).copy(), dd)


def _prepare(shape: Shape, x, quad: SphereQuadrature | None):
    p = _vec(x)
    shape._check_dim(p)
    if quad is None:
        quad = default_rule(shape.dim)
    if quad.dim != shape.dim:
        raise DomainError(f"quadrature is {quad.dim}-D but the shape is {shape.dim}-D")
    return p, quad


def _integrate(shape, x, quad, lam, log_mode=False):
    """Per-ray values, whether any ray starts inside, and the sampled inradius."""
    n = shape.dim
    vals = np.empty(quad.size)
    starts_inside = False
    min_exit = np.inf
    for sl, batch in _rays(shape, x, quad):
        vals[sl] = batch_contributions(batch, lam, log_mode, n)
        lo, hi = batch.first()
        inside = lo <= 0
        if inside.any():
            starts_inside = True
        exit_ = np.where(inside, hi, 0.0)
        min_exit = min(min_exit, float(exit_.min(initial=np.inf)))
    return vals, starts_inside, (min_exit if starts_inside else 0.0)


def potential(shape: Shape, x, lam: float, quad: SphereQuadrature | None = None) -> PotentialValue:
    """Regularized potential V^(lam) of ``shape`` at ``x``.

    Raises ``BoundaryPointError`` for ``lam <= 0`` at a boundary point.
    """
    p, quad = _prepare(shape, x, quad)
    lam = float(lam)
    vals, touches, inradius = _integrate(shape, p, quad, lam)
    interior = inradius > INTERIOR_TOL
    if lam <= 0 and touches and not interior:
        raise BoundaryPointError(f"x={p.tolist()} lies on the boundary; lambda={lam} <= 0 is not regularizable there")
    value = float(np.dot(quad.weights, vals))
    return PotentialValue(value, bool(lam <= 0 and interior), quad.size, quadrature_error(vals, quad))


def log_potential(shape: Shape, x, quad: SphereQuadrature | None = None) -> PotentialValue:
    """Integral of log(1/|x - y|) over the shape."""
    p, quad = _prepare(shape, x, quad)
    vals, _, _ = _integrate(shape, p, quad, float(shape.dim), log_mode=True)
    return PotentialValue(float(np.dot(quad.weights, vals)), False, quad.size, quadrature_error(vals, quad))


def potential_via_complement(shape: Shape, x, lam: float, quad: SphereQuadrature | None = None,
                             world_radius: float = WORLD_RADIUS) -> float:
    """``-integral over the complement`` form of the potential, for lam < 0 at interior x."""
    if not lam < 0:
        raise DomainError(f"the complement form needs lambda < 0, got {lam}")
    p, quad = _prepare(shape, x, quad)
    vals = np.empty(quad.size)
    for sl, batch in _rays(shape, p, quad):
        lo, hi = batch.first()
        if np.any(lo > 0) or np.any(hi <= INTERIOR_TOL):
            raise DomainError(f"x={p.tolist()} is not an interior point")
        comp = batch.complement(world_radius)
        # the last complement piece [a, W] plus the tail beyond W is -a^lam/lam
        body = _primitive_diff(comp.lo, comp.hi, lam, drop_zero=False)
        vals[sl] = body - world_radius ** lam / lam
    return float(-np.dot(quad.weights, vals))


def v_hat(shape: Shape, x, lam: float, quad: SphereQuadrature | None = None) -> float:
    """Normalized potential V/(n - lam); the log potential when lam = n."""
    n = shape.dim
    if lam == n:
        return log_potential(shape, x, quad).value
    return potential(shape, x, lam, quad).value / (n - lam)


def v_hat_and_inradius(shape: Shape, x, lam: float, quad: SphereQuadrature) -> tuple[float, float]:
    """V-hat and the sampled inradius from a single pass over the rays.

    V-hat is NaN where it is undefined (lam <= 0 at a boundary point).
    """
    p, quad = _prepare(shape, x, quad)
    n = shape.dim
    log_mode = lam == n
    vals, touches, inradius = _integrate(shape, p, quad, float(lam), log_mode)
    if lam <= 0 and touches and inradius <= INTERIOR_TOL:
        return float("nan"), inradius
    total = float(np.dot(quad.weights, vals))
    return (total if log_mode else total / (n - lam)), inradius


def _moment(shape, x, quad, p_exp):
    """Per-ray integrals of r^(p_exp - 1) and a flag for rays starting inside."""
    vals = np.empty(quad.size)
    inside_any = False
    for sl, batch in _rays(shape, x, quad):
        lo, _ = batch.first()
        inside = bool(np.any(lo <= 0))
        inside_any |= inside
        vals[sl] = _primitive_diff(batch.lo, batch.hi, p_exp, drop_zero=False)
    return vals, inside_any


def gradient(shape: Shape, x, lam: float, quad: SphereQuadrature | None = None) -> np.ndarray:
    """Gradient of V-hat; needs lam > 1 unless x is outside the shape."""
    p, quad = _prepare(shape, x, quad)
    vals, inside = _moment(shape, p, quad, lam - 1.0)
    if inside and lam <= 1:
        raise DomainError(f"the gradient integral diverges at points of the shape for lambda={lam} <= 1")
    return (quad.weights * vals) @ quad.directions


def hessian(shape: Shape, x, lam: float, quad: SphereQuadrature | None = None) -> np.ndarray:
    """Hessian of V-hat; needs lam > 2 unless x is outside the shape."""
    p, quad = _prepare(shape, x, quad)
    n = shape.dim
    vals, inside = _moment(shape, p, quad, lam - 2.0)
    if inside and lam <= 2:
        raise DomainError(f"the Hessian integral diverges at points of the shape for lambda={lam} <= 2")
    wv = quad.weights * vals
    d = quad.directions
    h = -((lam - n - 2.0) * (d.T * wv) @ d + np.eye(n) * wv.sum())
    return 0.5 * (h + h.T)

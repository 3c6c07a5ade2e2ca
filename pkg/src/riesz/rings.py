"""Ball-proximity measures: minimal rings, asphericity, bi-Hausdorff distance to balls.

``r(x)`` is the distance from ``x`` to the complement, sampled along a
direction rule (0 when ``x`` is not an interior point) and ``R(x)`` the
largest distance from ``x`` to the body. Searches share one scheme: score an
interior grid, then refine the best separated candidates with Nelder-Mead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .centers import cluster
from .errors import DomainError
from .quadrature import SphereQuadrature, circle_rule, fibonacci_rule, monte_carlo_rule
from .shapes import Shape, _vec, bounding_ball

GRID_RESOLUTION = 64
CANDIDATES = 8
VALUE_TOL = 1e-6
DEDUP = 1e-3
MIN_INRADIUS = 1e-9
# refinement tolerance, relative to the circumradius
REFINE_XTOL = 1e-10


def ring_rule(n: int, seed: int = 0) -> SphereQuadrature:
    """Direction rule for the refinement stage and single-point queries."""
    if n == 2:
        return circle_rule(4096)
    if n == 3:
        return fibonacci_rule(20000)
    return monte_carlo_rule(n, 100_000, seed)


def grid_rule(n: int, seed: int = 0) -> SphereQuadrature:
    """Coarser rule for scoring the grid."""
    if n == 2:
        return circle_rule(512)
    if n == 3:
        return fibonacci_rule(2000)
    return monte_carlo_rule(n, 10_000, seed)


def _directions(quad, n):
    if quad is None:
        return ring_rule(n).directions
    if isinstance(quad, SphereQuadrature):
        return quad.directions
    return np.asarray(quad, dtype=float)


def radii(shape: Shape, points, quad: SphereQuadrature | np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(r, R) at each point from one batched ray cast.

    R is closed form when the shape provides it and the largest sampled
    distance otherwise.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    shape._check_dim(pts)
    d = _directions(quad, shape.dim)
    m, k = pts.shape[0], d.shape[0]
    r = np.empty(m)
    big = np.empty(m)
    inside = shape.contains_many(pts, strict=True)
    chunk = max(1, 262_144 // k)
    for s in range(0, m, chunk):
        p = pts[s : s + chunk]
        batch = shape.intervals(np.repeat(p, k, axis=0), np.tile(d, (p.shape[0], 1)))
        lo, hi = batch.first()
        exit_ = np.where(lo <= 1e-12, hi, 0.0).reshape(p.shape[0], k)
        r[s : s + chunk] = exit_.min(axis=1)
        big[s : s + chunk] = batch.last_end().reshape(p.shape[0], k).max(axis=1)
    r = np.where(inside, r, 0.0)
    if shape.exact_circumradius:
        big = np.array([shape.circumradius(p) for p in pts])
    return r, big


def phi(shape: Shape, x, quad: SphereQuadrature | np.ndarray | None = None) -> float:
    """R(x) - r(x); equals R(x) off the interior."""
    p = _vec(x)
    r, big = radii(shape, p, quad)
    return float(big[0] - r[0])


@dataclass
class MinimalRingReport:
    centers: list[np.ndarray]
    r: float
    R: float
    phi: float
    values: list[float]

    def to_dict(self) -> dict:
        return {"centers": [c.tolist() for c in self.centers], "values": self.values,
                "r": self.r, "R": self.R, "phi": self.phi}


def _grid(shape: Shape, resolution: int) -> np.ndarray:
    if resolution < 2:
        raise DomainError("grid resolution must be at least 2")
    lo, hi = shape.bounds()
    if not np.all(np.isfinite(lo) & np.isfinite(hi)) or np.any(hi - lo > 1e5):
        raise DomainError("the shape is unbounded; grid search needs a bounded body")
    axes = [np.linspace(a, b, resolution + 2)[1:-1] for a, b in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, shape.dim)
    return pts[shape.contains_many(pts, strict=True)]


def _separated(points, scores, count, spacing):
    """Up to ``count`` best-scoring points, each at least ``spacing`` from the others."""
    picked = []
    for i in np.argsort(scores, kind="stable"):
        if not np.isfinite(scores[i]):
            break
        if all(np.linalg.norm(points[i] - points[j]) >= spacing for j in picked):
            picked.append(i)
            if len(picked) == count:
                break
    return points[picked]


def _search(shape: Shape, score, resolution, quad, candidates):
    """Minimize ``score(r, R)`` over interior points; all near-best minimizers."""
    n = shape.dim
    pts = _grid(shape, resolution)
    if pts.shape[0] == 0:
        raise DomainError("no interior grid point; the shape has empty sampled interior")
    r, big = radii(shape, pts, grid_rule(n))
    with np.errstate(divide="ignore", invalid="ignore"):
        s = score(r, big)
    lo, hi = shape.bounds()
    spacing = 2.0 * float(np.max((hi - lo) / (resolution + 1)))
    starts = _separated(pts, s, candidates, spacing)
    if starts.shape[0] == 0:
        raise DomainError("no grid point with positive inradius")
    fine = _directions(quad, n)
    _, scale = bounding_ball(shape)

    def objective(x):
        r1, b1 = radii(shape, x, fine)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = float(score(r1, b1)[0])
        return v if np.isfinite(v) else np.inf

    found = []
    for x0 in starts:
        simplex = np.vstack([x0, x0 + spacing * np.eye(n)])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": REFINE_XTOL * scale, "fatol": 1e-12,
                                "maxiter": 2000, "maxfev": 4000})
        found.append((np.asarray(res.x), float(res.fun)))
    best = min(v for _, v in found)
    near = [(p, v) for p, v in found if v <= best + VALUE_TOL]
    reps = cluster([p for p, _ in near], [-v for _, v in near], DEDUP * scale)
    reps.sort(key=lambda pv: (-pv[1], tuple(pv[0])))
    return [(p, -v) for p, v in reps]


def minimal_ring(shape: Shape, grid_resolution: int = GRID_RESOLUTION,
                 quad: SphereQuadrature | np.ndarray | None = None, candidates: int = CANDIDATES) -> MinimalRingReport:
    """Centers minimizing R - r, every refined minimizer within VALUE_TOL of the best."""
    hits = _search(shape, lambda r, big: np.where(r > 0, big - r, np.inf), grid_resolution, quad, candidates)
    x0 = hits[0][0]
    r, big = radii(shape, x0, _directions(quad, shape.dim))
    return MinimalRingReport([p for p, _ in hits], float(r[0]), float(big[0]), float(big[0] - r[0]),
                             [v for _, v in hits])


def asphericity(shape: Shape, grid_resolution: int = GRID_RESOLUTION,
                quad: SphereQuadrature | np.ndarray | None = None, candidates: int = CANDIDATES) -> tuple[float, np.ndarray]:
    """inf of R/r - 1 over interior points with r > MIN_INRADIUS, and a minimizer."""
    hits = _search(shape, lambda r, big: np.where(r > MIN_INRADIUS, big / r - 1.0, np.inf),
                   grid_resolution, quad, candidates)
    point, value = hits[0]
    return max(value, 0.0), point


def bihausdorff_to_ball(shape: Shape, x, rho: float, quad: SphereQuadrature | np.ndarray | None = None) -> float:
    """Bi-Hausdorff distance from the shape to the ball of radius ``rho`` about ``x``."""
    if not rho > 0:
        raise DomainError(f"ball radius must be positive, got {rho}")
    r, big = radii(shape, _vec(x), quad)
    return float(max(big[0] - rho, rho - r[0], 0.0))


@dataclass(frozen=True)
class BestBall:
    center: np.ndarray
    radius: float
    distance: float

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius, "distance": self.distance}


def best_ball(shape: Shape, grid_resolution: int = GRID_RESOLUTION,
              quad: SphereQuadrature | np.ndarray | None = None) -> BestBall:
    """Ball through the middle of the minimal ring and its bi-Hausdorff distance."""
    ring = minimal_ring(shape, grid_resolution, quad)
    return BestBall(ring.centers[0], 0.5 * (ring.R + ring.r), 0.5 * ring.phi)

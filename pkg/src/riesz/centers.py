"""Multi-start search for r^(lam-n)-centers: the maximizers of V-hat.

Maximizing ``V-hat = V/(n - lam)`` covers every regime at once: it is the
maximum of V for ``lam < n``, the minimum of V for ``lam > n`` and the
maximum of the log potential at ``lam = n``.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .engine import batch_contributions, gradient, hessian, v_hat_and_inradius
from .errors import ConvergenceError, DomainError
from .quadrature import SphereQuadrature, circle_rule, default_rule, fibonacci_rule, monte_carlo_rule
from .shapes import Shape, bounding_ball, first_exits

BARRIER = 1e-6
SIMPLEX_SIZE = 0.05
XTOL = 1e-6
NEWTON_TOL = 1e-9
# coarse end points closer than this (times R) share one refinement
COARSE_CLUSTER = 1e-2
POLISH_SIMPLEX = 5e-3


def search_rule(n: int, seed: int = 0) -> SphereQuadrature:
    """A lighter direction rule for the many evaluations of a search."""
    if n == 2:
        return circle_rule(1024)
    if n == 3:
        return fibonacci_rule(4000)
    return monte_carlo_rule(n, 20000, seed)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RIESZ_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class CenterSearchConfig:
    lam: float
    starts: int = 24
    cluster_radius: float | None = None
    max_iterations: int = 400
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise DomainError("at least one start is needed")
        if self.cluster_radius is not None and not self.cluster_radius > 0:
            raise DomainError("cluster radius must be positive")


@dataclass
class StartResult:
    start: np.ndarray
    point: np.ndarray
    value: float
    converged: bool
    method: str
    evaluations: int


@dataclass
class CenterReport:
    centers: list[tuple[np.ndarray, float]]
    unique: bool
    search_domain: dict
    lam: float
    failures: int = 0
    runs: list[StartResult] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "unique": self.unique,
            "n_centers": len(self.centers),
            "centers": [{"point": p.tolist(), "vhat": v} for p, v in self.centers],
            "search_domain": self.search_domain,
            "failed_starts": self.failures,
        }


class _Objective:
    """Negated V-hat with the interior barrier for lam <= 0."""

    def __init__(self, shape, lam, quad, barrier):
        self.shape, self.lam, self.quad, self.barrier = shape, lam, quad, barrier
        self.calls = 0

    def vhat(self, x) -> float:
        self.calls += 1
        val, r = v_hat_and_inradius(self.shape, x, self.lam, self.quad)
        if self.lam <= 0 and (not r > self.barrier or not np.isfinite(val)):
            return -np.inf
        return val

    def __call__(self, x) -> float:
        return -self.vhat(x)


def _starts(shape: Shape, cfg: CenterSearchConfig, quad: SphereQuadrature, center, radius, barrier):
    n = shape.dim
    sampler = qmc.Halton(d=n, scramble=True, seed=cfg.seed)
    picked = []
    for _ in range(50):
        raw = center + radius * (2.0 * sampler.random(max(64, 16 * cfg.starts)) - 1.0)
        raw = raw[np.linalg.norm(raw - center, axis=1) <= radius]
        if cfg.lam <= 0:
            raw = raw[shape.contains_many(raw, strict=True)]
            if raw.size:
                raw = raw[first_exits(shape, raw, quad.directions) > barrier]
        picked.extend(raw)
        if len(picked) >= cfg.starts:
            break
    if not picked:
        raise DomainError("no interior start point found; the sampled interior is empty")
    return np.array(picked[: cfg.starts])


def _nelder_mead(obj: _Objective, x0, scale, max_iter, size=SIMPLEX_SIZE):
    n = x0.size
    simplex = np.vstack([x0, x0 + size * scale * np.eye(n)])
    res = minimize(obj, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": XTOL * scale, "fatol": np.inf,
                            "maxiter": max_iter, "maxfev": 4 * max_iter})
    return np.asarray(res.x), -float(res.fun), bool(res.success) and np.isfinite(res.fun)


def _newton(obj: _Objective, x0, scale, max_iter):
    """Newton ascent with backtracking.

    Returns None when the Hessian is not negative definite or the line search
    stalls far from a stationary point, so the caller can fall back to the
    simplex method. Below ``XTOL * scale`` a step that fails to halve, or a
    full step that does not ascend, marks the gradient's quadrature noise
    floor and ends the iteration as converged.
    """
    shape, lam, quad = obj.shape, obj.lam, obj.quad
    x = np.array(x0, dtype=float)
    f = obj.vhat(x)
    prev = np.inf
    for _ in range(max_iter):
        g = gradient(shape, x, lam, quad)
        h = hessian(shape, x, lam, quad)
        if np.linalg.eigvalsh(h).max() >= 0:
            return None
        step = -np.linalg.solve(h, g)
        norm = np.linalg.norm(step)
        if norm < NEWTON_TOL * scale:
            return x, f, True
        small = norm < XTOL * scale
        if small and norm > 0.5 * prev:
            return x, f, True
        prev = norm
        if norm > 0.25 * scale:
            step *= 0.25 * scale / norm
        for _ in range(1 if small else 30):
            f_new = obj.vhat(x + step)
            if f_new >= f:
                break
            step *= 0.5
        else:
            # no ascent left at quadrature resolution
            return (x, f, True) if small else None
        x = x + step
        f = f_new
    return x, f, False


def _local(obj: _Objective, x0, scale, max_iter, size=SIMPLEX_SIZE) -> StartResult:
    calls0 = obj.calls
    if obj.lam > 2:
        out = _newton(obj, x0, scale, max_iter)
        if out is not None:
            x, f, ok = out
            return StartResult(x0, x, f, ok, "newton", obj.calls - calls0)
    x, f, ok = _nelder_mead(obj, x0, scale, max_iter, size)
    return StartResult(x0, x, f, ok, "nelder-mead", obj.calls - calls0)


def cluster(points: Sequence[np.ndarray], values: Sequence[float], radius: float) -> list[tuple[np.ndarray, float]]:
    """Greedy clustering, best value first; each cluster keeps its best point."""
    order = sorted(range(len(points)), key=lambda i: (-values[i], tuple(points[i])))
    reps: list[tuple[np.ndarray, float]] = []
    for i in order:
        if all(np.linalg.norm(points[i] - p) > radius for p, _ in reps):
            reps.append((points[i], values[i]))
    return reps


def _map(fn, items):
    threads = thread_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def find_centers(shape: Shape, config: CenterSearchConfig, quad: SphereQuadrature | None = None,
                 polish_quad: SphereQuadrature | None = None) -> CenterReport:
    """Local maximizers of V-hat from ``config.starts`` low-discrepancy starts.

    Every start is optimized with the light rule ``quad``. The distinct end
    points are then re-optimized with ``polish_quad`` (the engine default
    rule unless given), whose quadrature noise is far below the clustering
    radius, and clustered at ``config.cluster_radius``.
    """
    lam = float(config.lam)
    quad = quad or search_rule(shape.dim, config.seed)
    polish_quad = polish_quad or default_rule(shape.dim, seed=config.seed)
    center, radius = bounding_ball(shape)
    barrier = BARRIER * radius
    starts = _starts(shape, config, quad, center, radius, barrier)

    coarse = _map(lambda x0: _local(_Objective(shape, lam, quad, barrier), x0, radius, config.max_iterations),
                  starts)
    good = [r for r in coarse if r.converged and np.isfinite(r.value)]
    if not good:
        raise ConvergenceError(f"all {config.starts} starts failed to converge at lambda={lam}")
    c_rad = config.cluster_radius or 1e-3 * radius
    basins = cluster([r.point for r in good], [r.value for r in good], max(c_rad, COARSE_CLUSTER * radius))

    fine = _map(lambda pv: _local(_Objective(shape, lam, polish_quad, barrier), pv[0], radius,
                                  config.max_iterations, POLISH_SIMPLEX), basins)
    done = [r for r in fine if r.converged and np.isfinite(r.value)]
    if not done:
        raise ConvergenceError(f"refinement failed for every basin at lambda={lam}")
    centers = cluster([r.point for r in done], [r.value for r in done], c_rad)
    domain = {"kind": "interior" if lam <= 0 else "bounding-ball",
              "center": center.tolist(), "radius": radius}
    failures = len(coarse) - len(good) + len(fine) - len(done)
    return CenterReport(centers, len(centers) == 1, domain, lam, failures, coarse + fine)


def centroid(shape: Shape, quad: SphereQuadrature | None = None) -> np.ndarray:
    """Center of mass from per-ray first moments about the bounding-box center."""
    quad = quad or default_rule(shape.dim)
    n = shape.dim
    lo, hi = shape.bounds()
    x = 0.5 * (lo + hi)
    d = quad.directions
    batch = shape.intervals(np.broadcast_to(x, d.shape).copy(), d)
    vol = float(np.dot(quad.weights, batch_contributions(batch, float(n))))
    first = batch_contributions(batch, float(n + 1))
    return x + (quad.weights * first) @ d / vol


@dataclass
class SweepRow:
    param: float
    lam: float
    n_centers: int
    centers: list[tuple[np.ndarray, float]]
    asphericity: float


def uniqueness_sweep(family: Callable[[float], Shape], params: Iterable[float], lambdas: Iterable[float],
                     config: CenterSearchConfig, quad: SphereQuadrature | None = None,
                     with_asphericity: bool = True, grid_resolution: int = 64) -> list[SweepRow]:
    """Center multiplicity over a (parameter, lambda) grid."""
    from .rings import asphericity

    params = list(params)
    lambdas = list(lambdas)
    if not params or not lambdas:
        raise DomainError("the sweep needs at least one parameter and one lambda")
    rows = []
    for p in params:
        shape = family(p)
        alpha = asphericity(shape, grid_resolution)[0] if with_asphericity else float("nan")
        for lam in lambdas:
            cfg = CenterSearchConfig(lam, config.starts, config.cluster_radius, config.max_iterations, config.seed)
            rep = find_centers(shape, cfg, quad)
            rows.append(SweepRow(float(p), float(lam), len(rep.centers), rep.centers, alpha))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    """One line per reported center: param, lambda, n_centers, coords, vhat, asphericity."""
    dim = max((c[0].size for r in rows for c in r.centers), default=2)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "lambda", "n_centers"] + [f"x{i}" for i in range(dim)] + ["vhat", "asphericity"])
    fmt = lambda v: format(float(v), ".17g")
    for r in rows:
        for point, val in r.centers:
            w.writerow([fmt(r.param), fmt(r.lam), r.n_centers] + [fmt(c) for c in point] + [fmt(val), fmt(r.asphericity)])
    return buf.getvalue()

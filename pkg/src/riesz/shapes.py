"""CSG shape algebra over R^n.

Every node answers three vectorised queries: point membership, the interval
set ``{t >= 0 : o + t d in shape}`` for a batch of rays, and an axis-aligned
bounding box. The public helpers at the bottom (``contains``,
``ray_intervals``, ``inradius_at``, ``circumradius_at``, ``parallel_body``)
take single points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import intervals as iv
from .errors import DomainError, ShapeError
from .intervals import IntervalBatch, IntervalSet
from .quadrature import SphereQuadrature, circle_rule, fibonacci_rule, monte_carlo_rule

WORLD_RADIUS = 1e6
DIRECTION_TOL = 1e-12


def _vec(x, name="point") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 2 or not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} must be a finite vector of length >= 2, got {x!r}")
    return arr


class Shape:
    """Base class. Subclasses are immutable dataclasses."""

    dim: int
    # True when ``circumradius`` is closed form rather than ray-sampled
    exact_circumradius = False

    def contains_many(self, pts: np.ndarray, strict: bool = False) -> np.ndarray:
        raise NotImplementedError

    def intervals(self, origins: np.ndarray, dirs: np.ndarray) -> IntervalBatch:
        raise NotImplementedError

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def circumradius(self, x: np.ndarray) -> float:
        """Max distance from ``x`` to the shape (exact or sampled, per node)."""
        return _sampled_circumradius(self, x)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check_dim(self, arr: np.ndarray):
        if arr.shape[-1] != self.dim:
            raise DomainError(f"dimension mismatch: shape is {self.dim}-D, got {arr.shape[-1]}-D input")


# -- primitives ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball(Shape):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        if not self.radius > 0:
            raise ShapeError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_many(self, pts, strict=False):
        d2 = np.sum((pts - self.center) ** 2, axis=-1)
        r2 = self.radius ** 2
        return d2 < r2 if strict else d2 <= r2

    def intervals(self, origins, dirs):
        oc = origins - self.center
        b = np.einsum("ij,ij->i", oc, dirs)
        disc = b * b - (np.einsum("ij,ij->i", oc, oc) - self.radius ** 2)
        s = np.sqrt(np.maximum(disc, 0.0))
        hi = np.where(disc > 0, -b + s, -np.inf)
        return IntervalBatch.single(-b - s, hi)

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    exact_circumradius = True

    def circumradius(self, x):
        return float(np.linalg.norm(x - self.center) + self.radius)

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Box(Shape):
    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo, hi = _vec(self.min, "box min"), _vec(self.max, "box max")
        if lo.shape != hi.shape or not np.all(lo < hi):
            raise ShapeError("box needs min < max componentwise")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def dim(self) -> int:
        return self.min.size

    def contains_many(self, pts, strict=False):
        if strict:
            return np.all((pts > self.min) & (pts < self.max), axis=-1)
        return np.all((pts >= self.min) & (pts <= self.max), axis=-1)

    def intervals(self, origins, dirs):
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (self.min - origins) / dirs
            tb = (self.max - origins) / dirs
        flat = dirs == 0.0
        inside = (origins >= self.min) & (origins <= self.max)
        near = np.where(flat, np.where(inside, -np.inf, np.inf), np.minimum(ta, tb))
        far = np.where(flat, np.where(inside, np.inf, -np.inf), np.maximum(ta, tb))
        return IntervalBatch.single(near.max(axis=1), far.min(axis=1))

    def bounds(self):
        return self.min.copy(), self.max.copy()

    exact_circumradius = True

    def circumradius(self, x):
        return float(np.linalg.norm(np.maximum(np.abs(x - self.min), np.abs(x - self.max))))

    def to_dict(self):
        return {"type": "box", "min": self.min.tolist(), "max": self.max.tolist()}


@dataclass(frozen=True, eq=False)
class HalfSpace(Shape):
    """``{y : normal . y <= offset}``; only meaningful inside a bounded node."""

    normal: np.ndarray
    offset: float
    world_radius: float = WORLD_RADIUS

    def __post_init__(self):
        nrm = _vec(self.normal, "normal")
        length = np.linalg.norm(nrm)
        if length == 0:
            raise ShapeError("half-space normal must be non-zero")
        object.__setattr__(self, "normal", nrm / length)
        object.__setattr__(self, "offset", float(self.offset) / length)

    @property
    def dim(self) -> int:
        return self.normal.size

    def contains_many(self, pts, strict=False):
        s = pts @ self.normal
        return s < self.offset if strict else s <= self.offset

    def intervals(self, origins, dirs):
        s = origins @ self.normal - self.offset
        nd = dirs @ self.normal
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = -s / nd
        w = self.world_radius
        lo = np.where(nd < 0, cross, np.where((nd == 0) & (s <= 0), 0.0, np.where(nd > 0, 0.0, np.inf)))
        hi = np.where(nd > 0, cross, np.where((nd == 0) & (s > 0), -np.inf, w))
        return IntervalBatch.single(lo, np.minimum(hi, w))

    def bounds(self):
        w = self.world_radius
        return np.full(self.dim, -w), np.full(self.dim, w)

    def to_dict(self):
        return {"type": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


@dataclass(frozen=True, eq=False)
class StarBody2D(Shape):
    """Planar body ``{r <= rho(theta)}`` about the origin.

    ``radii[k]`` is rho at angle ``2 pi k / K``; rho is linear in angle between
    samples.
    """

    radii: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float).ravel()
        if r.size < 3 or not np.all(r > 0) or not np.all(np.isfinite(r)):
            raise ShapeError("star body needs >= 3 positive radial samples")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)

    dim = 2

    @classmethod
    def from_function(cls, rho, n_samples: int = 256) -> "StarBody2D":
        theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
        return cls(np.asarray(rho(theta), dtype=float))

    @property
    def step(self) -> float:
        return 2.0 * np.pi / self.radii.size

    def rho(self, theta: np.ndarray) -> np.ndarray:
        k = self.radii.size
        s = np.mod(theta, 2.0 * np.pi) / self.step
        i = np.floor(s).astype(int) % k
        f = s - np.floor(s)
        return (1.0 - f) * self.radii[i] + f * self.radii[(i + 1) % k]

    def contains_many(self, pts, strict=False):
        r = np.hypot(pts[..., 0], pts[..., 1])
        lim = self.rho(np.arctan2(pts[..., 1], pts[..., 0]))
        return r < lim if strict else r <= lim

    def _gap(self, o, d, t):
        px = o[:, 0] + t * d[:, 0]
        py = o[:, 1] + t * d[:, 1]
        return np.hypot(px, py) - self.rho(np.arctan2(py, px))

    def _crossings(self, o, d, ts, te, cross):
        """Sample-ray crossings inside ``[ts, te]``, in ray order.

        The polar angle along a line is monotone, so the crossed sample rays
        are consecutive indices starting at the segment's first angle.
        Returns ``(t, g)`` of shape ``(N, M)`` with NaN padding.
        """
        h = self.step
        k_all = self.radii.size
        s = np.where(cross > 0, 1, -1)
        ps = o + ts[:, None] * d
        pe = o + te[:, None] * d
        phi_s = np.arctan2(ps[:, 1], ps[:, 0])
        phi_e = np.arctan2(pe[:, 1], pe[:, 0])
        sweep = np.mod(s * (phi_e - phi_s), 2.0 * np.pi)
        # a line sweeps less than pi; larger values are rounding wrap-around
        sweep = np.where(sweep > np.pi, 0.0, sweep)
        sweep = np.where(te > ts, sweep, -1.0)
        first = np.where(s > 0, np.ceil(phi_s / h), np.floor(phi_s / h))
        last = np.where(s > 0, np.floor((phi_s + sweep) / h), np.ceil((phi_s - sweep) / h))
        count = np.where(sweep >= 0, s * (last - first) + 1, 0).astype(int)
        count = np.maximum(count, 0)
        width = int(count.max(initial=0))
        n = o.shape[0]
        if width == 0:
            return np.full((n, 0), np.nan), np.full((n, 0), np.nan)
        j = np.arange(width)
        k = first[:, None] + s[:, None] * j
        ang = k * h
        ux, uy = np.cos(ang), np.sin(ang)
        ox, oy, dx, dy = o[:, :1], o[:, 1:], d[:, :1], d[:, 1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -(ox * uy - oy * ux) / (dx * uy - dy * ux)
        t = np.clip(t, ts[:, None], te[:, None])
        radial = (ox + t * dx) * ux + (oy + t * dy) * uy
        g = radial - self.radii[k.astype(int) % k_all]
        ok = j < count[:, None]
        return np.where(ok, t, np.nan), np.where(ok, g, np.nan)

    def _split_caps(self, o, d, nodes, g, m, iters=40):
        """Insert a node where the ray dips in or out between two nodes.

        Between consecutive nodes the boundary is one interpolated arc, so a
        ray can cut a cap off it without a sign change at the nodes. The
        radius of the arc is bracketed by its values at the two nodes, which
        rules most pairs out; the rest get a golden-section extremum search.
        """
        if nodes.shape[1] < 2:
            return nodes, g, m
        ta, tb = nodes[:, :-1], nodes[:, 1:]
        ga, gb = g[:, :-1], g[:, 1:]
        pair = m[:, 1:] & m[:, :-1] & (tb > ta)
        along = np.einsum("ij,ij->i", o, d)[:, None]
        with np.errstate(invalid="ignore"):
            ra = np.hypot(o[:, :1] + ta * d[:, :1], o[:, 1:] + ta * d[:, 1:])
            rb = np.hypot(o[:, :1] + tb * d[:, :1], o[:, 1:] + tb * d[:, 1:])
            rho_a, rho_b = ra - ga, rb - gb
            tc = np.clip(-along, ta, tb)
            rmin = np.hypot(o[:, :1] + tc * d[:, :1], o[:, 1:] + tc * d[:, 1:])
            out = pair & (ga > 0) & (gb > 0) & (rmin < np.maximum(rho_a, rho_b))
            inn = pair & (ga <= 0) & (gb <= 0) & (np.maximum(ra, rb) > np.minimum(rho_a, rho_b))
        ri, ci = np.nonzero(out | inn)
        if ri.size == 0:
            return nodes, g, m
        sign = np.where(out[ri, ci], 1.0, -1.0)
        lo, hi = ta[ri, ci].copy(), tb[ri, ci].copy()
        f = lambda t: sign * self._gap(o[ri], d[ri], t)
        inv = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - inv * (hi - lo)
        x2 = lo + inv * (hi - lo)
        f1, f2 = f(x1), f(x2)
        for _ in range(iters):
            left = f1 < f2
            lo = np.where(left, lo, x1)
            hi = np.where(left, x2, hi)
            x_new = np.where(left, hi - inv * (hi - lo), lo + inv * (hi - lo))
            f_new = f(x_new)
            x1, x2 = np.where(left, x_new, x2), np.where(left, x1, x_new)
            f1, f2 = np.where(left, f_new, f2), np.where(left, f1, f_new)
        tstar = np.where(f1 < f2, x1, x2)
        gstar = sign * np.minimum(f1, f2)
        flip = np.where(sign > 0, gstar <= 0, gstar > 0)
        if not flip.any():
            return nodes, g, m
        extra_t = np.full(nodes.shape[0], np.nan)
        extra_g = np.full(nodes.shape[0], np.nan)
        # at most one insertion per ray per pass; extra passes are rare
        rows_seen = {}
        for r, t_, g_ in zip(ri[flip], tstar[flip], gstar[flip]):
            rows_seen.setdefault(r, (t_, g_))
        for r, (t_, g_) in rows_seen.items():
            extra_t[r], extra_g[r] = t_, g_
        nodes = np.concatenate([nodes, extra_t[:, None]], axis=1)
        g = np.concatenate([g, extra_g[:, None]], axis=1)
        key = np.where(np.isfinite(nodes), nodes, np.inf)
        order = np.argsort(key, axis=1, kind="stable")
        nodes = np.take_along_axis(key, order, axis=1)
        g = np.take_along_axis(g, order, axis=1)
        m = np.isfinite(nodes)
        if len(rows_seen) < int(flip.sum()):
            return self._split_caps(o, d, np.where(m, nodes, np.nan), g, m, iters)
        return nodes, g, m

    def intervals(self, origins, dirs):
        n = origins.shape[0]
        outer = float(self.radii.max()) * 1.001
        inner = float(self.radii.min()) * 0.999
        ox, oy = origins[:, 0], origins[:, 1]
        dx, dy = dirs[:, 0], dirs[:, 1]
        cross = ox * dy - oy * dx
        along = ox * dx + oy * dy
        r2 = ox ** 2 + oy ** 2
        disc = along ** 2 - (r2 - outer ** 2)
        sq = np.sqrt(np.maximum(disc, 0.0))
        a0 = np.maximum(-along - sq, 0.0)
        a1 = -along + sq
        hits = (disc > 0) & (a1 > 0)

        lo = np.full((n, 1), np.inf)
        hi = np.full((n, 1), np.inf)
        radial = hits & (np.abs(cross) <= 1e-14 * np.maximum(1.0, np.sqrt(r2)))
        if radial.any():
            th = np.arctan2(dy[radial], dx[radial])
            a = np.maximum(-self.rho(th + np.pi) - along[radial], 0.0)
            b = self.rho(th) - along[radial]
            ok = b > a
            lo[radial, 0] = np.where(ok, a, np.inf)
            hi[radial, 0] = np.where(ok, b, np.inf)
        rows = np.flatnonzero(hits & ~radial)
        if rows.size == 0:
            return iv._normalize(lo, hi)

        o, d = origins[rows], dirs[rows]
        A0, A1, al = a0[rows], a1[rows], along[rows]
        # the disk of radius ``inner`` lies inside the body: only the band
        # between the two circles needs root finding
        disc_i = al ** 2 - (r2[rows] - inner ** 2)
        sqi = np.sqrt(np.maximum(disc_i, 0.0))
        through = (disc_i > 0) & (-al + sqi > A0)
        B0 = np.where(through, np.clip(-al - sqi, A0, A1), A1)
        B1 = np.where(through, np.clip(-al + sqi, A0, A1), A1)
        t1, g1 = self._crossings(o, d, A0, B0, cross[rows])
        t2, g2 = self._crossings(o, d, B1, A1, cross[rows])
        ends = np.column_stack([A0, B0, B1, A1])
        rr = np.repeat(np.arange(rows.size), 4)
        g_ends = self._gap(o[rr], d[rr], ends.ravel()).reshape(-1, 4)
        nodes = np.concatenate([ends[:, :1], t1, ends[:, 1:3], t2, ends[:, 3:]], axis=1)
        g = np.concatenate([g_ends[:, :1], g1, g_ends[:, 1:3], g2, g_ends[:, 3:]], axis=1)
        m = np.isfinite(nodes)
        nodes = iv._compact(nodes, m)
        g = np.take_along_axis(np.where(m, g, np.nan), np.argsort(~m, axis=1, kind="stable"), axis=1)[:, : nodes.shape[1]]
        m = np.isfinite(nodes)
        nodes, g, m = self._split_caps(o, d, nodes, g, m)

        inside = g <= 0
        pair = m[:, 1:] & m[:, :-1]
        change = pair & (inside[:, 1:] != inside[:, :-1])
        ri, ci = np.nonzero(change)
        roots = _bracket_roots(lambda idx, t: self._gap(o[ri[idx]], d[ri[idx]], t),
                               nodes[ri, ci], nodes[ri, ci + 1], g[ri, ci], g[ri, ci + 1])
        enter = np.full(nodes.shape, np.inf)
        leave = np.full(nodes.shape, np.inf)
        up = ~inside[ri, ci]
        enter[ri[up], ci[up] + 1] = roots[up]
        leave[ri[~up], ci[~up] + 1] = roots[~up]
        enter[:, 0] = np.where(inside[:, 0], nodes[:, 0], np.inf)
        e_lo = iv._compact(enter, np.isfinite(enter))
        e_hi = iv._compact(leave, np.isfinite(leave))
        width = max(e_lo.shape[1], e_hi.shape[1], 1)
        full_lo = np.full((n, width), np.inf)
        full_hi = np.full((n, width), np.inf)
        full_lo[:, :1] = lo
        full_hi[:, :1] = hi
        full_lo[rows, : e_lo.shape[1]] = e_lo
        full_hi[rows, : e_hi.shape[1]] = e_hi
        return iv._normalize(full_lo, full_hi)

    def bounds(self):
        r = float(self.radii.max())
        return np.array([-r, -r]), np.array([r, r])

    def to_dict(self):
        return {"type": "star2d", "radii": self.radii.tolist()}


def _bracket_roots(f, a, b, fa, fb, tol=1e-15, max_iter=100):
    """Vectorised Illinois (modified regula falsi) on sign-changing brackets."""
    a, b, fa, fb = a.copy(), b.copy(), fa.copy(), fb.copy()
    idx = np.arange(a.size)
    side = np.zeros(a.size, dtype=int)
    active = np.ones(a.size, dtype=bool)
    x = 0.5 * (a + b)
    for it in range(max_iter):
        act = np.flatnonzero(active)
        if act.size == 0:
            break
        aa, bb, ffa, ffb = a[act], b[act], fa[act], fb[act]
        denom = ffb - ffa
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(denom != 0, bb - ffb * (bb - aa) / denom, 0.5 * (aa + bb))
        # every fourth step is a plain bisection to guarantee shrinkage
        if it % 4 == 3:
            c = 0.5 * (aa + bb)
        c = np.clip(c, np.minimum(aa, bb), np.maximum(aa, bb))
        fc = f(idx[act], c)
        x[act] = c
        same_a = np.sign(fc) == np.sign(ffa)
        a[act] = np.where(same_a, c, aa)
        fa[act] = np.where(same_a, fc, np.where(side[act] == -1, ffa * 0.5, ffa))
        b[act] = np.where(same_a, bb, c)
        fb[act] = np.where(same_a, np.where(side[act] == 1, ffb * 0.5, ffb), fc)
        side[act] = np.where(same_a, 1, -1)
        done = (np.abs(b[act] - a[act]) <= tol * np.maximum(1.0, np.abs(c))) | (fc == 0)
        active[act[done]] = False
    return x


@dataclass(frozen=True, eq=False)
class UnionOfBalls(Shape):
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.atleast_1d(np.asarray(self.radii, dtype=float))
        if r.size == 1 and c.shape[0] > 1:
            r = np.full(c.shape[0], float(r[0]))
        if c.shape[0] != r.size or c.shape[0] == 0 or c.shape[1] < 2:
            raise ShapeError("union of balls needs matching non-empty centers and radii")
        if not np.all(r > 0):
            raise ShapeError("ball radii must be positive")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def contains_many(self, pts, strict=False):
        d2 = np.sum((pts[..., None, :] - self.centers) ** 2, axis=-1)
        r2 = self.radii ** 2
        return np.any(d2 < r2 if strict else d2 <= r2, axis=-1)

    def intervals(self, origins, dirs):
        oc = origins[:, None, :] - self.centers[None, :, :]
        b = np.einsum("ikj,ij->ik", oc, dirs)
        disc = b * b - (np.einsum("ikj,ikj->ik", oc, oc) - self.radii ** 2)
        s = np.sqrt(np.maximum(disc, 0.0))
        hi = np.where(disc > 0, -b + s, -np.inf)
        return iv.raw_union(-b - s, hi)

    def bounds(self):
        return (self.centers - self.radii[:, None]).min(0), (self.centers + self.radii[:, None]).max(0)

    exact_circumradius = True

    def circumradius(self, x):
        return float(np.max(np.linalg.norm(self.centers - x, axis=1) + self.radii))

    def to_dict(self):
        return {"type": "union_of_balls", "centers": self.centers.tolist(), "radii": self.radii.tolist()}


# -- combinators --------------------------------------------------------------


def _children_dim(children) -> int:
    dims = {c.dim for c in children}
    if len(dims) != 1:
        raise ShapeError(f"children of mixed dimension {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=False)
class Union(Shape):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ShapeError("union needs at least one child")
        _children_dim(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def contains_many(self, pts, strict=False):
        return np.any([c.contains_many(pts, strict) for c in self.children], axis=0)

    def intervals(self, origins, dirs):
        return iv.union(*[c.intervals(origins, dirs) for c in self.children])

    def bounds(self):
        bs = [c.bounds() for c in self.children]
        return np.min([b[0] for b in bs], axis=0), np.max([b[1] for b in bs], axis=0)

    @property
    def exact_circumradius(self) -> bool:
        return all(c.exact_circumradius for c in self.children)

    def circumradius(self, x):
        return max(c.circumradius(x) for c in self.children)

    def to_dict(self):
        return {"type": "union", "children": [c.to_dict() for c in self.children]}


@dataclass(frozen=True, eq=False)
class Intersection(Shape):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ShapeError("intersection needs at least one child")
        _children_dim(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def contains_many(self, pts, strict=False):
        return np.all([c.contains_many(pts, strict) for c in self.children], axis=0)

    def intervals(self, origins, dirs):
        return iv.intersection(*[c.intervals(origins, dirs) for c in self.children])

    def bounds(self):
        bs = [c.bounds() for c in self.children]
        return np.max([b[0] for b in bs], axis=0), np.min([b[1] for b in bs], axis=0)

    def to_dict(self):
        return {"type": "intersection", "children": [c.to_dict() for c in self.children]}


@dataclass(frozen=True, eq=False)
class Difference(Shape):
    left: Shape
    right: Shape

    def __post_init__(self):
        _children_dim([self.left, self.right])

    @property
    def dim(self) -> int:
        return self.left.dim

    def contains_many(self, pts, strict=False):
        return self.left.contains_many(pts, strict) & ~self.right.contains_many(pts, not strict)

    def intervals(self, origins, dirs):
        return iv.difference(self.left.intervals(origins, dirs), self.right.intervals(origins, dirs))

    def bounds(self):
        return self.left.bounds()

    def to_dict(self):
        return {"type": "difference", "left": self.left.to_dict(), "right": self.right.to_dict()}


@dataclass(frozen=True, eq=False)
class Translate(Shape):
    child: Shape
    vector: np.ndarray

    def __post_init__(self):
        v = _vec(self.vector, "translation")
        if v.size != self.child.dim:
            raise ShapeError("translation vector dimension mismatch")
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.child.dim

    def contains_many(self, pts, strict=False):
        return self.child.contains_many(pts - self.vector, strict)

    def intervals(self, origins, dirs):
        return self.child.intervals(origins - self.vector, dirs)

    def bounds(self):
        lo, hi = self.child.bounds()
        return lo + self.vector, hi + self.vector

    @property
    def exact_circumradius(self) -> bool:
        return self.child.exact_circumradius

    def circumradius(self, x):
        return self.child.circumradius(x - self.vector)

    def to_dict(self):
        return {"type": "translate", "child": self.child.to_dict(), "vector": self.vector.tolist()}


@dataclass(frozen=True, eq=False)
class Scale(Shape):
    """Homothety ``y -> factor * y`` about the origin."""

    child: Shape
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise ShapeError(f"scale factor must be positive, got {self.factor}")
        object.__setattr__(self, "factor", float(self.factor))

    @property
    def dim(self) -> int:
        return self.child.dim

    def contains_many(self, pts, strict=False):
        return self.child.contains_many(pts / self.factor, strict)

    def intervals(self, origins, dirs):
        return self.child.intervals(origins / self.factor, dirs).scaled(self.factor)

    def bounds(self):
        lo, hi = self.child.bounds()
        return lo * self.factor, hi * self.factor

    @property
    def exact_circumradius(self) -> bool:
        return self.child.exact_circumradius

    def circumradius(self, x):
        return self.factor * self.child.circumradius(x / self.factor)

    def to_dict(self):
        return {"type": "scale", "child": self.child.to_dict(), "factor": self.factor}


# -- public queries -----------------------------------------------------------


@lru_cache(maxsize=8)
def _probe_directions(n: int) -> np.ndarray:
    if n == 2:
        return circle_rule(4096).directions
    if n == 3:
        return fibonacci_rule(20000).directions
    return monte_carlo_rule(n, 100_000, seed=12345).directions


def _sampled_circumradius(shape: Shape, x: np.ndarray) -> float:
    d = _probe_directions(shape.dim)
    ends = shape.intervals(np.broadcast_to(x, d.shape).copy(), d).last_end()
    return float(ends.max(initial=0.0))


def contains(shape: Shape, x) -> bool:
    """True iff ``x`` lies in the closed realized set."""
    p = _vec(x)
    shape._check_dim(p)
    return bool(shape.contains_many(p[None, :])[0])


def ray_intervals_batch(shape: Shape, origins: np.ndarray, dirs: np.ndarray) -> IntervalBatch:
    origins = np.atleast_2d(np.asarray(origins, dtype=float))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    shape._check_dim(origins)
    shape._check_dim(dirs)
    if np.max(np.abs(np.linalg.norm(dirs, axis=1) - 1.0), initial=0.0) > DIRECTION_TOL:
        raise DomainError("ray directions must be unit vectors")
    origins, dirs = np.broadcast_arrays(origins, dirs)
    return shape.intervals(np.ascontiguousarray(origins), np.ascontiguousarray(dirs))


def ray_intervals(shape: Shape, origin, direction) -> IntervalSet:
    """The set ``{t >= 0 : origin + t * direction in shape}``."""
    o = _vec(origin, "origin")
    d = _vec(direction, "direction")
    return ray_intervals_batch(shape, o[None, :], d[None, :]).row(0)


def first_exits(shape: Shape, points: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Inradius along ``dirs`` for each of ``points``: ``(M,)`` minima.

    For each point, the end of the interval containing ``t = 0`` minimised
    over directions; 0 where some direction starts outside the shape.
    """
    points = np.atleast_2d(points)
    m, k = points.shape[0], dirs.shape[0]
    out = np.empty(m)
    chunk = max(1, 2_000_000 // max(k, 1))
    for s in range(0, m, chunk):
        p = points[s : s + chunk]
        o = np.repeat(p, k, axis=0)
        d = np.tile(dirs, (p.shape[0], 1))
        lo, hi = shape.intervals(o, d).first()
        exit_ = np.where(lo <= 1e-12, hi, 0.0)
        out[s : s + chunk] = exit_.reshape(p.shape[0], k).min(axis=1)
    return out


def inradius_at(shape: Shape, x, directions: SphereQuadrature | np.ndarray) -> float:
    """Sampled r(x): distance to the complement along the given directions."""
    p = _vec(x)
    shape._check_dim(p)
    d = directions.directions if isinstance(directions, SphereQuadrature) else np.asarray(directions)
    if not shape.contains_many(p[None, :])[0]:
        return 0.0
    return float(first_exits(shape, p[None, :], d)[0])


def circumradius_at(shape: Shape, x) -> float:
    """R(x) = max distance from ``x`` to the shape."""
    p = _vec(x)
    shape._check_dim(p)
    return float(shape.circumradius(p))


def parallel_body(points: Sequence, ell: float) -> Shape:
    """Union of radius-``ell`` balls about a finite point cloud."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ShapeError("parallel body needs at least one point")
    if not ell > 0:
        raise ShapeError(f"parallel body radius must be positive, got {ell}")
    if pts.shape[0] == 1:
        return Ball(pts[0], ell)
    return UnionOfBalls(pts, np.full(pts.shape[0], float(ell)))


def bounding_ball(shape: Shape) -> tuple[np.ndarray, float]:
    """Center of the bounding box and the circumradius about it."""
    lo, hi = shape.bounds()
    c = 0.5 * (lo + hi)
    return c, circumradius_at(shape, c)


# -- JSON ---------------------------------------------------------------------


def from_dict(spec: dict) -> Shape:
    """Build a shape from its JSON description (see README for the schema)."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise ShapeError(f"shape description needs a 'type' field: {spec!r}")
    kind = spec["type"]
    try:
        if kind == "ball":
            return Ball(spec["center"], spec["radius"])
        if kind == "box":
            return Box(spec["min"], spec["max"])
        if kind == "halfspace":
            return HalfSpace(spec["normal"], spec["offset"], spec.get("world_radius", WORLD_RADIUS))
        if kind == "star2d":
            return StarBody2D(spec["radii"])
        if kind == "union_of_balls":
            return UnionOfBalls(spec["centers"], spec["radii"])
        if kind == "union":
            return Union(tuple(from_dict(c) for c in spec["children"]))
        if kind == "intersection":
            return Intersection(tuple(from_dict(c) for c in spec["children"]))
        if kind == "difference":
            return Difference(from_dict(spec["left"]), from_dict(spec["right"]))
        if kind == "translate":
            return Translate(from_dict(spec["child"]), spec["vector"])
        if kind == "scale":
            return Scale(from_dict(spec["child"]), spec["factor"])
        if kind == "parallel_body":
            return parallel_body(spec["points"], spec["ell"])
    except KeyError as exc:
        raise ShapeError(f"shape '{kind}' is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ShapeError):
            raise
        raise ShapeError(f"bad field in shape '{kind}': {exc}") from None
    raise ShapeError(f"unknown shape type {kind!r}")

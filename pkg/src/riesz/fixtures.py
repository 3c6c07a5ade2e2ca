"""Named test bodies and one-parameter shape families.

A builtin is addressed as ``NAME`` or ``NAME:PARAM``; the parameter is the
family parameter listed in ``FAMILIES``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ShapeError
from .shapes import Ball, Box, Difference, HalfSpace, Intersection, Shape, StarBody2D, Union, UnionOfBalls, parallel_body


def ball(radius: float = 1.0) -> Shape:
    return Ball([0.0, 0.0], radius)


def box(half_width: float = 1.0) -> Shape:
    return Box([-half_width, -half_width], [half_width, half_width])


def two_balls(offset: float = 3.0) -> Shape:
    """Unit disks at -offset e1 and +offset e1."""
    return UnionOfBalls([[-offset, 0.0], [offset, 0.0]], [1.0, 1.0])


def slit_ball(eps: float = 0.1) -> Shape:
    """The unit disk with the strip |x2| < eps removed."""
    if not 0 < eps < 1:
        raise ShapeError(f"slit half-width must lie in (0, 1), got {eps}")
    disk = Ball([0.0, 0.0], 1.0)
    upper = Intersection((disk, HalfSpace([0.0, -1.0], -eps)))
    lower = Intersection((disk, HalfSpace([0.0, 1.0], -eps)))
    return Union((upper, lower))


def two_lobe_x(eps: float = 0.1) -> Shape:
    """Unit disks at A=(0,0) and B=(1,0), each with a thin outer arc about the other.

    The arc about A is the annulus 2-eps <= |y - A| <= 2 cut to y1 >= 1/2;
    the arc about B is the mirror image, cut to y1 <= 1/2.
    """
    if not 0 < eps < 1:
        raise ShapeError(f"arc width must lie in (0, 1), got {eps}")
    a, b = [0.0, 0.0], [1.0, 0.0]
    ring_a = Difference(Ball(a, 2.0), Ball(a, 2.0 - eps))
    ring_b = Difference(Ball(b, 2.0), Ball(b, 2.0 - eps))
    arc_a = Intersection((ring_a, HalfSpace([-1.0, 0.0], -0.5)))
    arc_b = Intersection((ring_b, HalfSpace([1.0, 0.0], 0.5)))
    return Union((Ball(a, 1.0), Ball(b, 1.0), arc_a, arc_b))


def star_cos3(eps: float = 0.05, n_samples: int = 256) -> Shape:
    """Star body rho(theta) = 1 + eps cos(3 theta)."""
    if not 0 <= eps < 1:
        raise ShapeError(f"star amplitude must lie in [0, 1), got {eps}")
    return StarBody2D.from_function(lambda t: 1.0 + eps * np.cos(3.0 * t), n_samples)


def segment_parallel_body(ell: float = 10.0) -> Shape:
    """Parallel body of the two-point cloud {0, e1}."""
    return parallel_body([[0.0, 0.0], [1.0, 0.0]], ell)


FAMILIES: dict[str, Callable[[float], Shape]] = {
    "ball": ball,
    "box": box,
    "two-balls": two_balls,
    "slit-ball": slit_ball,
    "two-lobe-x": two_lobe_x,
    "star-cos3": star_cos3,
    "segment-parallel": segment_parallel_body,
}


def family(name: str) -> Callable[[float], Shape]:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ShapeError(f"unknown builtin {name!r}; known: {', '.join(sorted(FAMILIES))}") from None


def builtin(spec: str) -> Shape:
    """Resolve ``NAME`` or ``NAME:PARAM`` to a shape."""
    name, _, param = spec.partition(":")
    make = family(name)
    if not param:
        return make()
    try:
        value = float(param)
    except ValueError:
        raise ShapeError(f"builtin parameter must be a number, got {param!r}") from None
    return make(value)

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz import intervals as iv
from riesz.errors import DomainError, ShapeError
from riesz.fixtures import FAMILIES, builtin
from riesz.quadrature import circle_rule
from riesz.shapes import (
    Ball, Box, Difference, HalfSpace, Intersection, Scale, StarBody2D, Translate, Union, UnionOfBalls,
    circumradius_at, contains, from_dict, inradius_at, parallel_body, ray_intervals, ray_intervals_batch,
)

E1 = np.array([1.0, 0.0])


def test_contains_examples():
    assert contains(Ball([0, 0], 1), [0, 0])
    assert not contains(Difference(Ball([0, 0], 2), Ball([0, 0], 1)), [0, 0])
    assert contains(Box([0, 0], [1, 2]), [0.5, 1.9])


def test_ray_interval_examples():
    assert ray_intervals(Ball([0, 0], 1), [0, 0], E1).intervals == ((0.0, 1.0),)
    got = ray_intervals(Union((Ball([0, 0], 1), Ball([3, 0], 1))), [0, 0], E1)
    assert np.allclose(got.intervals, [(0, 1), (2, 4)])
    got = ray_intervals(Difference(Ball([0, 0], 2), Ball([0, 0], 1)), [0, 0], E1)
    assert np.allclose(got.intervals, [(1, 2)])


def test_degenerate_direction_rejected():
    with pytest.raises(DomainError):
        ray_intervals(Ball([0, 0], 1), [0, 0], [1.0, 1e-5])


def test_dimension_mismatch_rejected():
    with pytest.raises(DomainError):
        contains(Ball([0, 0], 1), [0, 0, 0])


@pytest.mark.parametrize("bad", [
    lambda: Ball([0, 0], 0),
    lambda: Box([0, 0], [1, 0]),
    lambda: StarBody2D([1.0, -1.0, 1.0]),
    lambda: Scale(Ball([0, 0], 1), 0),
    lambda: Union(()),
    lambda: Union((Ball([0, 0], 1), Ball([0, 0, 0], 1))),
    lambda: parallel_body([], 1.0),
    lambda: parallel_body([[0, 0]], -1.0),
])
def test_constructor_invariants(bad):
    with pytest.raises(ShapeError):
        bad()


def test_inradius_examples(golden):
    q = circle_rule(4096)
    assert inradius_at(Ball([0, 0], 1), 0.25 * E1, q) == pytest.approx(0.75, abs=1e-15)
    assert inradius_at(Ball([0, 0], 1), 2 * E1, q) == 0.0
    u = Union((Ball([0, 0], 1), Ball(0.5 * E1, 1)))
    assert inradius_at(u, 0.25 * E1, circle_rule(1_000_000)) == pytest.approx(golden["union_inradius_quarter"], abs=1e-12)


def test_circumradius_examples():
    assert circumradius_at(Ball([0, 0], 1), 0.25 * E1) == pytest.approx(1.25)
    assert circumradius_at(Box([-1, -1], [1, 1]), [0, 0]) == pytest.approx(math.sqrt(2))
    assert circumradius_at(UnionOfBalls([[0, 0], [3, 0]], [1, 1]), [0, 0]) == pytest.approx(4)


def test_parallel_body_examples():
    single = parallel_body([[0, 0]], 2.0)
    assert isinstance(single, Ball) and single.radius == 2.0
    three = parallel_body([[0, 0], [1, 0], [0, 1]], 0.1)
    assert isinstance(three, UnionOfBalls)
    got = ray_intervals(three, [-1, 0], E1)
    assert np.allclose(got.intervals, [(0.9, 1.1), (1.9, 2.1)])


# -- random shapes ------------------------------------------------------------

coord = st.floats(-1.5, 1.5)
radius = st.floats(0.3, 1.5)


@st.composite
def primitives(draw):
    kind = draw(st.sampled_from(["ball", "box", "union_of_balls", "star"]))
    if kind == "ball":
        return Ball([draw(coord), draw(coord)], draw(radius))
    if kind == "box":
        lo = np.array([draw(coord), draw(coord)])
        return Box(lo, lo + np.array([draw(radius), draw(radius)]))
    if kind == "union_of_balls":
        k = draw(st.integers(1, 4))
        return UnionOfBalls([[draw(coord), draw(coord)] for _ in range(k)], [draw(radius) for _ in range(k)])
    eps = draw(st.floats(0.0, 0.4))
    m = draw(st.integers(1, 5))
    return Translate(StarBody2D.from_function(lambda t: 1 + eps * np.cos(m * t), 64), [draw(coord), draw(coord)])


@st.composite
def shapes(draw, depth=2):
    if depth == 0 or draw(st.booleans()):
        return draw(primitives())
    op = draw(st.sampled_from(["union", "intersection", "difference", "scale", "halfcut"]))
    a = draw(shapes(depth - 1))
    if op == "scale":
        return Scale(a, draw(st.floats(0.5, 2.0)))
    if op == "halfcut":
        ang = draw(st.floats(0, 2 * math.pi))
        return Intersection((a, HalfSpace([math.cos(ang), math.sin(ang)], draw(coord))))
    b = draw(shapes(depth - 1))
    return {"union": Union((a, b)), "intersection": Intersection((a, b)), "difference": Difference(a, b)}[op]


def _rays(seed, k=20):
    rng = np.random.default_rng(seed)
    o = rng.uniform(-2.5, 2.5, (k, 2))
    th = rng.uniform(0, 2 * np.pi, k)
    return o, np.stack([np.cos(th), np.sin(th)], axis=1)


@given(shapes(), st.integers(0, 2**31))
def test_interval_membership_coherence(shape, seed):
    o, d = _rays(seed)
    batch = ray_intervals_batch(shape, o, d)
    rng = np.random.default_rng(seed + 1)
    for i in range(o.shape[0]):
        ivs = batch.row(i)
        ts = rng.uniform(0, 8, 100)
        ends = np.array([e for pair in ivs for e in pair]) if len(ivs) else np.array([np.inf])
        ts = ts[np.min(np.abs(ts[:, None] - ends[None, :]), axis=1) > 1e-9]
        inside = shape.contains_many(o[i] + ts[:, None] * d[i])
        expect = np.array([ivs.contains(t) for t in ts], dtype=bool)
        assert np.array_equal(inside, expect)


@given(shapes(1), shapes(1), st.integers(0, 2**31))
def test_boolean_nodes_combine_child_intervals(a, b, seed):
    o, d = _rays(seed)
    ia, ib = a.intervals(o, d), b.intervals(o, d)
    for node, op in [(Union((a, b)), iv.union), (Intersection((a, b)), iv.intersection),
                     (Difference(a, b), iv.difference)]:
        got, want = node.intervals(o, d), op(ia, ib)
        for i in range(o.shape[0]):
            assert got.row(i) == want.row(i)


@given(shapes(1), st.sampled_from([0.5, 2.0, 3.0]), st.integers(0, 2**31))
def test_scale_covariance(shape, k, seed):
    o, d = _rays(seed)
    base = shape.intervals(o, d)
    scaled = Scale(shape, k).intervals(k * o, d)
    for i in range(o.shape[0]):
        want = np.array(base.row(i).intervals) * k
        got = np.array(scaled.row(i).intervals)
        assert got.shape == want.shape and np.allclose(got, want, rtol=1e-12, atol=1e-12)


@given(shapes(), st.integers(0, 2**31))
def test_inradius_below_circumradius(shape, seed):
    q = circle_rule(256)
    for x in np.random.default_rng(seed).uniform(-2, 2, (5, 2)):
        r = inradius_at(shape, x, q)
        if r > 0:
            assert r <= circumradius_at(shape, x) + 1e-12


def test_inradius_equals_circumradius_only_at_ball_center():
    q = circle_rule(4096)
    b = Ball([0.3, 0.1], 0.8)
    assert inradius_at(b, [0.3, 0.1], q) == pytest.approx(circumradius_at(b, [0.3, 0.1]))
    assert inradius_at(b, [0.4, 0.1], q) < circumradius_at(b, [0.4, 0.1])


def test_inradius_converges_from_above():
    box = Box([-1, -1], [1, 1])
    x = [0.3, 0.1]
    vals = [inradius_at(box, x, circle_rule(k)) for k in (6, 60, 600)]
    assert vals[0] >= vals[1] >= vals[2] >= 0.7 - 1e-12


def test_star_matches_dense_membership():
    star = StarBody2D.from_function(lambda t: 1 + 0.3 * np.cos(5 * t) + 0.1 * np.sin(2 * t), 200)
    o, d = _rays(3, 400)
    batch = ray_intervals_batch(star, o, d)
    ts = np.linspace(0, 6, 6001)
    for i in range(0, 400, 7):
        inside = star.contains_many(o[i] + ts[:, None] * d[i])
        ivs = batch.row(i)
        expect = np.array([ivs.contains(t) for t in ts], dtype=bool)
        mismatch = np.nonzero(inside != expect)[0]
        for j in mismatch:
            ends = [e for pair in ivs for e in pair]
            assert min(abs(ts[j] - e) for e in ends) < 1e-9


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_builtin_json_round_trip(name):
    shape = builtin(name)
    again = from_dict(json.loads(json.dumps(shape.to_dict())))
    rng = np.random.default_rng(11)
    lo, hi = shape.bounds()
    lo, hi = np.maximum(lo, -20), np.minimum(hi, 20)
    o = rng.uniform(lo, hi, (100, 2))
    th = rng.uniform(0, 2 * np.pi, 100)
    d = np.stack([np.cos(th), np.sin(th)], axis=1)
    a, b = shape.intervals(o, d), again.intervals(o, d)
    for i in range(100):
        assert a.row(i) == b.row(i)


def test_from_dict_errors():
    with pytest.raises(ShapeError):
        from_dict({"type": "torus"})
    with pytest.raises(ShapeError):
        from_dict({"type": "ball", "center": [0, 0]})
    with pytest.raises(ShapeError):
        from_dict({"center": [0, 0]})


def test_halfspace_clipped_at_world_radius():
    got = ray_intervals(HalfSpace([1, 0], 0, world_radius=50.0), [0, 0], [-1, 0])
    assert got.intervals == ((0.0, 50.0),)

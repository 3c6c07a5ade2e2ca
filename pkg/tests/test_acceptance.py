"""Acceptance criteria 1-9, each at its stated tolerance.

Every criterion prints one ``CRITERION k: PASS|FAIL`` line; under pytest the
lines are repeated in the terminal summary. ``python3 tests/test_acceptance.py``
runs the checks without pytest.
"""

import json
import math
import pathlib
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

import oracles  # noqa: E402
from asymmetric import SHAPES  # noqa: E402
from riesz.ballpot import ball_potential, log_potential_ball, ode_residual, reflect_in_lambda, reflect_in_t  # noqa: E402
from riesz.centers import CenterSearchConfig, find_centers  # noqa: E402
from riesz.engine import potential, potential_via_complement  # noqa: E402
from riesz.fixtures import segment_parallel_body, slit_ball, star_cos3, two_balls, two_lobe_x  # noqa: E402
from riesz.quadrature import circle_rule, default_rule  # noqa: E402
from riesz.rings import asphericity, bihausdorff_to_ball, minimal_ring, phi  # noqa: E402
from riesz.shapes import Ball, Box, Difference, Scale, StarBody2D, Union, parallel_body  # noqa: E402

GOLDEN = pathlib.Path(__file__).with_name("golden.json")


def _line(k, ok, detail):
    return f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}"


def criterion_1():
    lambdas = [-3, -1, -0.5, 0, 0.5, 2, 3.7]
    ts = [0, 0.3, 0.6, 0.9, 1.5, 3]
    tol = {2: 1e-6, 3: 1e-4}
    start = time.perf_counter()
    worst = {}
    for n in (2, 3):
        quad = default_rule(n)
        body = Ball(np.zeros(n), 1.0)
        worst[n] = 0.0
        for lam in lambdas:
            for t in ts:
                x = np.zeros(n)
                x[0] = t
                exact = ball_potential(n, lam, t)
                got = potential(body, x, lam, quad).value
                # the lambda = 0 value at the center is exactly 0
                err = abs(got - exact) / abs(exact) if exact else abs(got)
                worst[n] = max(worst[n], err)
    elapsed = time.perf_counter() - start
    ok = worst[2] <= tol[2] and worst[3] <= tol[3] and elapsed < 60
    return ok, f"max rel error n=2 {worst[2]:.2e} (<= 1e-6), n=3 {worst[3]:.2e} (<= 1e-4), {elapsed:.1f} s (< 60 s)"


def criterion_2():
    cases = [(0.5, 2 * math.pi * 11 / 12), (2.0, 2 * math.pi / 3)]
    quad = default_rule(3)
    body = Ball(np.zeros(3), 1.0)
    closed = max(abs(ball_potential(3, 2.0, t) - want) for t, want in cases)
    engine = max(abs(potential(body, [t, 0, 0], 2.0, quad).value - want) / want for t, want in cases)
    ok = closed <= 1e-12 and engine <= 1e-4
    return ok, f"closed form abs error {closed:.1e} (<= 1e-12), engine rel error {engine:.2e} (<= 1e-4)"


def criterion_3():
    worst, where, misses = 0.0, None, 0
    for n in (2, 3, 4):
        for lam in (0.5, 1.0, 2.0, 3.0):
            at_one = ball_potential(n, lam, 1.0)
            for t in (1 - 1e-4, 1 + 1e-4):
                gap = abs(ball_potential(n, lam, t) - at_one)
                misses += gap > 1e-5
                if gap > worst:
                    worst, where = gap, (n, lam, t)
    ok = misses == 0
    return ok, f"{misses} of 24 one-sided values differ from the gamma value by more than 1e-5; worst {worst:.3g} at (n, lambda, t) = {where}"


def _samples(count=100, seed=20241016):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 7))
        lam = float(rng.uniform(-3, 4))
        t = float(rng.choice([-1, 1]) * rng.uniform(0.05, 3))
        if abs(lam) > 1e-3 and abs(abs(t) - 1) > 1e-2:
            out.append((n, lam, t))
    return out


def criterion_4():
    refl = ode = 0.0
    for n, lam, t in _samples():
        v = ball_potential(n, lam, t)
        scale = max(1.0, abs(v))
        refl = max(refl, abs(reflect_in_t(n, lam, t) - v) / scale, abs(reflect_in_lambda(n, lam, t) - v) / scale)
        ode = max(ode, abs(ode_residual(n, lam, t)))
    ok = refl <= 1e-9 and ode <= 1e-8
    return ok, f"reflection error {refl:.1e} (<= 1e-9, relative to max(1, |V|)), ODE residual {ode:.1e} (<= 1e-8)"


def criterion_5():
    q2 = circle_rule(65536)
    box = Box([-1.0, -2.0], [2.0, 1.0])
    vol = max(abs(potential(box, x, 2.0, q2).value - 9.0) for x in ([0, 0], [1.5, -1.5], [4, 4]))
    vol = max(vol, abs(potential(Ball([0.3, 0.1], 1.4), [0, 0], 2.0, q2).value - math.pi * 1.96))
    vol = max(vol, abs(potential(Ball([0, 0, 0], 1.0), [0.2, 0.1, 0], 3.0).value - 4 * math.pi / 3))

    csg = Union((Box([-1, -1], [1, 0.5]), Ball([0.8, 0.4], 0.7)))
    comp = 0.0
    for shape in (Ball([0, 0], 1.0), csg, Difference(Ball([0, 0], 2), Ball([0.5, 0], 0.3))):
        for lam in (-0.5, -1.0, -2.0):
            for x in ([0, 0.1], [-0.6, -0.5]):
                comp = max(comp, abs(potential_via_complement(shape, x, lam, q2) - potential(shape, x, lam, q2).value))

    q = circle_rule(4096)
    star = StarBody2D.from_function(lambda t: 1 + 0.2 * np.cos(3 * t), 128)
    homo = 0.0
    x = np.array([0.1, 0.15])
    for shape in (csg, star):
        for lam in (-1.0, 0.0, 0.5, 2.0, 3.0):
            for k in (0.5, 3.0):
                base = potential(shape, x, lam, q).value
                got = potential(Scale(shape, k), k * x, lam, q).value
                want = base + 2 * math.pi * math.log(k) if lam == 0 else k ** lam * base
                homo = max(homo, abs(got - want) / max(1.0, abs(want)))
    ok = vol <= 1e-6 and comp <= 1e-6 and homo <= 1e-8
    return ok, f"volume error {vol:.1e} (<= 1e-6), complement vs direct {comp:.1e} (<= 1e-6), homothety {homo:.1e} (<= 1e-8)"


def criterion_6(golden):
    start = time.perf_counter()
    c, r = np.array([0.4, -0.3]), 1.3
    ball_err = 0.0
    ball_unique = True
    for lam in (-2, -0.5, 0, 0.5, 2, 3, 5):
        rep = find_centers(Ball(c, r), CenterSearchConfig(lam))
        ball_unique &= rep.unique
        ball_err = max(ball_err, np.linalg.norm(rep.centers[0][0] - c) / r)
    centroid_gaps = {}
    for name, make in SHAPES.items():
        rep = find_centers(make(), CenterSearchConfig(2.0))
        target = np.array(golden["centroids"][name])
        centroid_gaps[name] = min(np.linalg.norm(p - target) for p, _ in rep.centers)
    count = len(find_centers(two_balls(), CenterSearchConfig(-5.0)).centers)
    elapsed = time.perf_counter() - start
    parts = {
        "ball": ball_unique and ball_err <= 1e-4,
        "centroid": all(g <= 1e-3 for g in centroid_gaps.values()),
        "two-balls": count == 2,
        "runtime": elapsed < 300,
    }
    gaps = ", ".join(f"{k} {v:.2g}" for k, v in centroid_gaps.items())
    detail = (f"ball center error {ball_err:.1e}*r (<= 1e-4) {'ok' if parts['ball'] else 'miss'}; "
              f"lambda=2 center to centroid {gaps} (<= 1e-3) {'ok' if parts['centroid'] else 'miss'}; "
              f"two-balls at lambda=-5 reports {count} centers {'ok' if parts['two-balls'] else 'miss'}; "
              f"{elapsed:.0f} s (< 300 s)")
    return all(parts.values()), detail


def criterion_7():
    counts = {}
    for eps in (0.01, 0.05, 0.1):
        shape = star_cos3(eps)
        for lam in (-2, -1, 0.5, 1, 3):
            counts[("star", eps, lam)] = len(find_centers(shape, CenterSearchConfig(lam, starts=48)).centers)
    body = segment_parallel_body(10.0)
    for lam in (-2, -1):
        counts[("parallel", 10.0, lam)] = len(find_centers(body, CenterSearchConfig(lam, starts=48)).centers)
    bad = {k: v for k, v in counts.items() if v != 1}
    return not bad, f"{len(counts) - len(bad)} of {len(counts)} (body, param, lambda) cases report one center" + (
        f"; multiple: {bad}" if bad else "")


def criterion_8():
    body = two_lobe_x()
    ring = minimal_ring(body)
    xs = sorted(float(p[0]) for p in ring.centers)
    two = len(ring.centers) == 2 and abs(xs[0]) <= 1e-2 and abs(xs[1] - 1) <= 1e-2
    phi_ok = abs(ring.phi - 1) <= 1e-3
    mid = phi(body, [0.5, 0.0])
    mid_ok = abs(mid - (math.sqrt(3.75) - math.sqrt(0.75))) <= 1e-3
    slit = bihausdorff_to_ball(slit_ball(0.1), [0.0, 0.0], 1.0)
    rng = np.random.default_rng(8)
    worst = -np.inf
    for _ in range(20):
        pts = rng.uniform(-1, 1, size=(int(rng.integers(2, 7)), 2))
        ell = float(rng.uniform(1.5, 10))
        diam = max(np.linalg.norm(p - q) for p in pts for q in pts)
        worst = max(worst, asphericity(parallel_body(pts, ell))[0] - diam / ell)
    ok = two and phi_ok and mid_ok and slit == 1.0 and worst <= 1e-3
    return ok, (f"body X centers x1={[round(x, 6) for x in xs]}, phi={ring.phi:.6f}; phi(0.5,0)={mid:.6f}; "
                f"slit ball d_bH={slit!r}; max alpha - d/ell over 20 clouds {worst:.2e} (<= 1e-3)")


def criterion_9():
    disk = abs(log_potential_ball(2, 0.0) - math.pi / 2)
    mc, se = oracles.ball_log_potential_mc(3, 0.5, 10_000_000, seed=7)
    fd = log_potential_ball(3, 0.5)
    z = abs(fd - mc) / se
    ok = disk <= 1e-6 and z <= 3
    return ok, f"disk at 0 error {disk:.1e} (<= 1e-6); ball3 t=0.5 {fd:.6f} vs Monte Carlo {mc:.6f} +- {se:.1e}, {z:.2f} SE (<= 3)"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def _evaluate(k, golden):
    fn = CRITERIA[k]
    ok, detail = fn(golden) if k == 6 else fn()
    return ok, _line(k, ok, detail)


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, golden, request):
    ok, line = _evaluate(k, golden)
    print(line)
    request.config.acceptance[k] = line
    assert ok, line


if __name__ == "__main__":
    data = json.loads(GOLDEN.read_text())
    results = [_evaluate(k, data) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)

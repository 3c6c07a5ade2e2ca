import numpy as np
import pytest

from asymmetric import SHAPES

from riesz import centers as centers_mod
from riesz.centers import (
    CenterSearchConfig, StartResult, centroid, cluster, find_centers, sweep_csv, uniqueness_sweep,
)
from riesz.errors import ConvergenceError, DomainError
from riesz.fixtures import two_balls
from riesz.quadrature import circle_rule
from riesz.shapes import Ball, Box, Scale, Translate, UnionOfBalls, inradius_at

TWO_DISK = SHAPES["two_disk"]()


def test_config_validation():
    with pytest.raises(DomainError):
        CenterSearchConfig(1.0, starts=0)
    with pytest.raises(DomainError):
        CenterSearchConfig(1.0, cluster_radius=0.0)


def test_cluster_keeps_best_and_separates():
    pts = [np.array([0.0, 0.0]), np.array([1e-4, 0.0]), np.array([1.0, 0.0])]
    reps = cluster(pts, [1.0, 2.0, 0.5], 1e-3)
    assert len(reps) == 2
    assert reps[0][1] == 2.0 and np.allclose(reps[0][0], [1e-4, 0])


@pytest.mark.parametrize("lam", [-0.5, 0.5, 3.0])
def test_off_center_ball(lam):
    rep = find_centers(Ball([0.3, -0.2], 1.5), CenterSearchConfig(lam, starts=8))
    assert rep.unique
    assert np.linalg.norm(rep.centers[0][0] - [0.3, -0.2]) <= 1e-4 * 1.5


def test_two_balls_have_two_centers():
    rep = find_centers(two_balls(), CenterSearchConfig(-5.0))
    assert len(rep.centers) == 2
    xs = sorted(p[0] for p, _ in rep.centers)
    assert xs[0] == pytest.approx(-3, abs=1e-3) and xs[1] == pytest.approx(3, abs=1e-3)
    assert not rep.unique


def test_reported_centers_are_separated():
    rep = find_centers(two_balls(), CenterSearchConfig(-5.0, starts=12))
    radius = 1e-3 * rep.search_domain["radius"]
    for i, (p, _) in enumerate(rep.centers):
        for q, _ in rep.centers[i + 1:]:
            assert np.linalg.norm(p - q) > radius


def test_interior_confinement_for_nonpositive_lambda():
    q = circle_rule(4096)
    for lam in (-2.0, 0.0):
        rep = find_centers(TWO_DISK, CenterSearchConfig(lam, starts=8))
        assert all(inradius_at(TWO_DISK, p, q) > 0 for p, _ in rep.centers)


def test_centroid_examples():
    assert np.allclose(centroid(Ball([0.4, -1.0], 2.0)), [0.4, -1.0], atol=1e-9)
    assert np.allclose(centroid(Box([0, 0], [2, 4])), [1, 2], atol=1e-9)
    assert np.allclose(centroid(UnionOfBalls([[0, 0], [3, 0]], [1, 1])), [1.5, 0], atol=1e-9)


def test_centroid_two_disk(golden):
    assert np.allclose(centroid(TWO_DISK), golden["centroids"]["two_disk"], atol=1e-7)


def test_r_squared_center_is_centroid(golden):
    # the r^2 potential is lambda = n + 2
    rep = find_centers(TWO_DISK, CenterSearchConfig(4.0, starts=8))
    assert rep.unique
    assert np.allclose(rep.centers[0][0], golden["centroids"]["two_disk"], atol=1e-6)


@pytest.mark.parametrize("name", sorted(SHAPES))
def test_r_squared_center_on_asymmetric_bodies(golden, name):
    rep = find_centers(SHAPES[name](), CenterSearchConfig(4.0, starts=8))
    assert rep.unique
    assert np.linalg.norm(rep.centers[0][0] - golden["centroids"][name]) <= 1e-6


@pytest.mark.parametrize("name", sorted(SHAPES))
def test_centroid_route_on_asymmetric_bodies(golden, name):
    assert np.allclose(centroid(SHAPES[name]()), golden["centroids"][name], atol=1e-7)


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_scale_equivariance(k):
    base = find_centers(TWO_DISK, CenterSearchConfig(4.0, starts=6))
    scaled = find_centers(Scale(TWO_DISK, k), CenterSearchConfig(4.0, starts=6))
    assert len(base.centers) == len(scaled.centers)
    assert np.allclose(scaled.centers[0][0], k * base.centers[0][0], atol=1e-4)


def test_translation_equivariance():
    v = np.array([1.7, -0.4])
    base = find_centers(TWO_DISK, CenterSearchConfig(4.0, starts=6))
    moved = find_centers(Translate(TWO_DISK, v), CenterSearchConfig(4.0, starts=6))
    assert len(base.centers) == len(moved.centers)
    assert np.allclose(moved.centers[0][0], base.centers[0][0] + v, atol=1e-6)


def test_determinism():
    cfg = CenterSearchConfig(-1.0, starts=6, seed=3)
    a = find_centers(TWO_DISK, cfg).to_dict()
    b = find_centers(TWO_DISK, cfg).to_dict()
    assert a == b


def test_thread_count_does_not_change_report(monkeypatch):
    cfg = CenterSearchConfig(0.5, starts=6, seed=1)
    a = find_centers(TWO_DISK, cfg).to_dict()
    monkeypatch.setenv("RIESZ_THREADS", "3")
    b = find_centers(TWO_DISK, cfg).to_dict()
    assert a == b


def test_no_interior_start():
    sliver = Box([0, 0], [1, 1e-9])
    with pytest.raises(DomainError):
        find_centers(sliver, CenterSearchConfig(-1.0, starts=4))


def test_all_starts_failing(monkeypatch):
    def never(obj, x0, scale, max_iter, size=0.05):
        return StartResult(x0, x0, float("nan"), False, "stub", 0)

    monkeypatch.setattr(centers_mod, "_local", never)
    with pytest.raises(ConvergenceError):
        find_centers(Ball([0, 0], 1), CenterSearchConfig(1.0, starts=3))


def test_ball_family_sweep_and_csv():
    rows = uniqueness_sweep(lambda r: Ball([0, 0], r), [0.5, 2.0], [-1.0, 3.0],
                            CenterSearchConfig(0.0, starts=4), with_asphericity=False)
    assert [r.n_centers for r in rows] == [1, 1, 1, 1]
    text = sweep_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "param,lambda,n_centers,x0,x1,vhat,asphericity"
    assert len(lines) == 5
    assert lines[1].startswith("0.5,-1,1,")


def test_sweep_needs_parameters():
    with pytest.raises(DomainError):
        uniqueness_sweep(lambda r: Ball([0, 0], r), [], [1.0], CenterSearchConfig(0.0))


def test_parallel_body_small_ell_reports_without_asserting_count():
    from riesz.fixtures import segment_parallel_body

    rep = find_centers(segment_parallel_body(0.6), CenterSearchConfig(-1.0, starts=8))
    assert len(rep.centers) >= 1

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bending.domains import BentDomain, Ellipsoid, Interval, Paraboloid, Polytope, Region
from bending.errors import ContainmentError, DomainError, ZeroVector
from bending.hilbert import (VolumeEstimate, busemann_density, busemann_unit_ball_volume,
                             busemann_volume, finsler_finite_difference, finsler_norm,
                             hilbert_distance, metric_comparison_check, unit_ball_volume)
from bending.hyperbolic import paraboloid_density
from bending.projective import ProjectivePoint, cross_ratio


def test_interval_distance_example():
    dom = Interval(-1.0, 1.0)
    assert hilbert_distance(dom, [0.0], [0.5]) == pytest.approx(0.5 * math.log(3))


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_interval_distance_is_half_log_cross_ratio(a, b):
    if abs(a - b) < 1e-6:
        return
    lo, hi = min(a, b), max(a, b)
    cr = cross_ratio(*[ProjectivePoint.from_affine([s]) for s in (-1.0, lo, hi, 1.0)])
    assert hilbert_distance(Interval(-1.0, 1.0), [a], [b]) == pytest.approx(0.5 * math.log(cr))


def test_distance_axioms(rng):
    dom = Ellipsoid.ball(3)
    pts = rng.uniform(-0.5, 0.5, size=(60, 3))
    x, y, z = pts[:20], pts[20:40], pts[40:]
    dxy = hilbert_distance(dom, x, y)
    assert np.allclose(dxy, hilbert_distance(dom, y, x))
    assert np.all(hilbert_distance(dom, x, z) <= dxy + hilbert_distance(dom, y, z) + 1e-12)
    assert np.all(hilbert_distance(dom, x, x) == 0.0)


def test_distance_requires_interior():
    with pytest.raises(DomainError):
        hilbert_distance(Ellipsoid.ball(2), [0.0, 0.0], [2.0, 0.0])


def test_finsler_ball_center():
    assert finsler_norm(Ellipsoid.ball(3), np.zeros(3), np.array([1.0, 0, 0])) == pytest.approx(1.0)
    with pytest.raises(ZeroVector):
        finsler_norm(Ellipsoid.ball(3), np.zeros(3), np.zeros(3))


@given(st.floats(0.1, 10.0))
def test_finsler_homogeneous(lam):
    dom = BentDomain(3)
    x, v = np.array([1.0, 1.0, 0.3]), np.array([0.2, -1.0, 0.5])
    assert finsler_norm(dom, x, lam * v) == pytest.approx(lam * finsler_norm(dom, x, v))


def test_finsler_matches_finite_difference_polytope(rng):
    dom = Polytope.simplex(3)
    for _ in range(20):
        x = rng.dirichlet(np.ones(4))[:3] * 0.9 + 0.02
        if not dom.contains(x):
            continue
        v = rng.normal(size=3)
        F = finsler_norm(dom, x, v)
        assert finsler_finite_difference(dom, x, v) == pytest.approx(F, rel=1e-5)


def test_unit_ball_volume_values():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_busemann_ball_at_center():
    vol = busemann_unit_ball_volume(Ellipsoid.ball(3), np.zeros(3), K=4096)
    assert vol.value == pytest.approx(4 * math.pi / 3, rel=1e-4)
    assert busemann_density(Ellipsoid.ball(3), np.zeros(3)) == pytest.approx(1.0, rel=1e-3)


@pytest.mark.parametrize("d", [2, 3])
def test_busemann_density_paraboloid_closed_form(d, rng):
    dom = Paraboloid(d)
    for _ in range(3):
        w = rng.normal(size=d - 1)
        h = np.exp(rng.normal())
        x = np.array([0.5 * w @ w + h, *w])
        assert busemann_density(dom, x, K=4096) == pytest.approx(paraboloid_density(x), rel=3e-3)


def test_busemann_volume_deterministic_and_csv():
    dom = Ellipsoid.ball(2)
    region = Region.ball([0.0, 0.0], 0.5)
    a = busemann_volume(dom, region, samples=400, seed=3)
    b = busemann_volume(dom, region, samples=400, seed=3)
    assert a == b
    assert a.to_csv().splitlines()[0] == "value,stderr,samples,seed"
    empty = busemann_volume(dom, Region.box([0.1, 0.1], [0.1, 0.3]), samples=10)
    assert empty == VolumeEstimate(0.0, 0.0, 0, 0)


def test_busemann_volume_small_ball_matches_lebesgue_density():
    dom = Ellipsoid.ball(2, radius=10.0)
    est = busemann_volume(dom, Region.ball([0.0, 0.0], 0.1), samples=400, seed=0, K=256)
    # density ~ (1/10)^2 near the center of a radius-10 disk
    assert abs(est.value - math.pi * 0.01 * 0.01) < 3 * est.stderr


def test_metric_comparison(rng):
    inner, outer = Ellipsoid.ball(3, 1.0), Ellipsoid.ball(3, 2.0)
    pts = rng.uniform(-0.5, 0.5, size=(200, 3))
    rep = metric_comparison_check(inner, outer, pts, rng=rng)
    assert rep.violations == 0 and rep.pairs == 200
    with pytest.raises(ContainmentError):
        metric_comparison_check(outer, inner, rng.uniform(0.6, 0.9, size=(5, 3)))

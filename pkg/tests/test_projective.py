import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bending.errors import CollinearityError, DegenerateCrossRatio, DegenerateLine
from bending.projective import (AffinePatch, ProjectiveHyperplane, ProjectiveMap,
                                ProjectivePoint, apply_map, canonical_vector, cross_ratio,
                                line_through, tolerance)

coords = st.lists(st.floats(-10, 10), min_size=3, max_size=5).filter(
    lambda v: np.linalg.norm(v) > 1e-3)


def P(*xs):
    return ProjectivePoint(np.array(xs, float))


def on_line(s):
    return ProjectivePoint.from_affine([s])


def test_cross_ratio_interval_value():
    assert cross_ratio(on_line(-1), on_line(0), on_line(0.5), on_line(1)) == pytest.approx(3.0)


def test_cross_ratio_coincident_points_is_one():
    assert cross_ratio(on_line(-1), on_line(0.2), on_line(0.2), on_line(1)) == pytest.approx(1.0)


def test_cross_ratio_errors():
    with pytest.raises(DegenerateCrossRatio):
        cross_ratio(on_line(0), on_line(0), on_line(0.5), on_line(1))
    with pytest.raises(CollinearityError):
        cross_ratio(P(1, 0, 0), P(0, 1, 0), P(0, 0, 1), P(1, 1, 1))


def test_cross_ratio_invariance_many(rng):
    worst = 0.0
    for _ in range(1000):
        a, b = rng.normal(size=3), rng.normal(size=3)
        s = np.sort(rng.uniform(-3, 3, size=4))
        pts = [ProjectivePoint(a + si * b) for si in s]
        g = ProjectiveMap(rng.normal(size=(3, 3)) + 3 * np.eye(3))
        before = cross_ratio(*pts)
        after = cross_ratio(*[g @ p for p in pts])
        worst = max(worst, abs(after - before) / before)
    assert worst < 1e-9


def test_cross_ratio_at_least_one_for_ordered_points(rng):
    for _ in range(100):
        s = np.sort(rng.uniform(-5, 5, size=4))
        assert cross_ratio(*[on_line(x) for x in s]) >= 1.0 - 1e-12


@given(coords)
def test_point_canonicalization_idempotent(v):
    p = ProjectivePoint(np.array(v))
    assert np.array_equal(ProjectivePoint(p.coords).coords, p.coords)
    assert ProjectivePoint(-3.0 * np.array(v)) == p


@given(coords)
def test_canonical_vector_unit_and_signed(v):
    c = canonical_vector(v)
    assert np.linalg.norm(c) == pytest.approx(1.0)
    assert c[np.flatnonzero(np.abs(c) > 1e-9)[0]] > 0


def test_map_scaling_idempotent(rng):
    g = ProjectiveMap(rng.normal(size=(4, 4)))
    assert abs(abs(np.linalg.det(g.matrix)) - 1.0) < 1e-12
    assert np.allclose(ProjectiveMap(g.matrix).matrix, g.matrix)


def test_apply_map_examples():
    x = P(0.3, -1, 2)
    assert apply_map(ProjectiveMap(np.eye(3)), x) == x
    assert apply_map(ProjectiveMap(2 * np.eye(3)), x) == x
    swap = ProjectiveMap(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], float))
    assert apply_map(swap, P(1, 0, 0)) == P(0, 1, 0)


def test_apply_map_composition(rng):
    g = ProjectiveMap(rng.normal(size=(4, 4)))
    h = ProjectiveMap(rng.normal(size=(4, 4)))
    x = ProjectivePoint(rng.normal(size=4))
    assert apply_map(g @ h, x).isclose(apply_map(g, apply_map(h, x)), tol=1e-8)


def test_map_composition_associative(rng):
    a, b, c = (ProjectiveMap(rng.normal(size=(3, 3))) for _ in range(3))
    assert ((a @ b) @ c).isclose(a @ (b @ c), tol=1e-9)


def test_incidence_duality(rng):
    for _ in range(50):
        H = ProjectiveHyperplane(rng.normal(size=4))
        basis = np.linalg.svd(H.covector[None, :])[2][1:]
        x = ProjectivePoint(rng.normal(size=3) @ basis)
        assert H.incident(x)
        g = ProjectiveMap(rng.normal(size=(4, 4)) + 2 * np.eye(4))
        assert (g @ H).incident(g @ x)


def test_line_through_examples():
    line = line_through(P(1, 0, 0), P(0, 1, 0))
    assert line(0.0) == P(1, 0, 0)
    assert line(np.pi / 2) == P(0, 1, 0)
    assert line(np.pi / 4) == P(1, 1, 0)
    assert not line.contains(P(0, 0, 1))
    assert line.contains(P(2, -5, 0))
    with pytest.raises(DegenerateLine):
        line_through(P(1, 2, 3), P(2, 4, 6))


def test_line_parameter_roundtrip():
    line = line_through(P(1, 0, 2), P(0, 1, -1))
    for s in np.linspace(0.1, 3.0, 7):
        assert line.parameter_of(line(s)) == pytest.approx(s % np.pi, abs=1e-9)


@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_patch_chart_unchart(x):
    patch = AffinePatch.standard(3)
    assert np.allclose(patch.chart(patch.unchart(x)), x, atol=1e-9)


def test_general_patch_roundtrip(rng):
    patch = AffinePatch(ProjectiveHyperplane([1.0, -2.0, 0.5, 1.0]))
    for _ in range(20):
        x = rng.normal(size=3)
        assert np.allclose(patch.chart(patch.unchart(x)), x, atol=1e-9)


def test_tolerance_context():
    from bending import projective
    before = projective.TOLERANCE
    with tolerance(1e-3):
        assert projective.TOLERANCE == 1e-3
    assert projective.TOLERANCE == before

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bending.errors import DimensionError, DomainError
from bending.hyperbolic import (Membership, QuadraticFormQ, bending_element, bending_matrix,
                                centralizer_membership, commutator, exp_nilpotent, gram_matrix,
                                hyperbolic_distance_Q, hyperboloid_membership,
                                hyperplane_stabilizer_generators, make_parabolic,
                                parabolic_algebra_element, parabolic_matrix, preserves_form,
                                preserves_wall, random_hyperplane_stabilizer)
from bending.projective import ProjectiveMap, ProjectivePoint


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_signature(d):
    assert QuadraticFormQ(d).signature() == (d, 1)


def test_membership_examples():
    assert hyperboloid_membership(ProjectivePoint([1, 0, 0, 0])) == Membership.BOUNDARY
    assert hyperboloid_membership(ProjectivePoint([1, 0, 0, 1])) == Membership.INTERIOR
    assert hyperboloid_membership(ProjectivePoint([0.5, 1, 0, 1])) == Membership.BOUNDARY
    assert hyperboloid_membership(ProjectivePoint([-1, 0, 0, 1])) == Membership.EXTERIOR


def test_make_parabolic_examples():
    assert np.allclose(make_parabolic([0, 0]).matrix, np.eye(4))
    v = np.array([0.4, -1.3])
    assert (make_parabolic(v) @ make_parabolic(-v)).isclose(ProjectiveMap(np.eye(4)))
    assert make_parabolic([1, 0]).matrix[0, -1] == pytest.approx(0.5)
    with pytest.raises(DimensionError):
        make_parabolic([1, 2, 3], d=3)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4))
def test_parabolic_preserves_form_and_fixes_infinity(v):
    g = parabolic_matrix(v)
    assert preserves_form(g, gram_matrix(len(v) + 1))
    e1 = np.zeros(len(v) + 2)
    e1[0] = 1
    assert np.allclose(g @ e1, e1)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4))
def test_exp_of_nilpotent_is_parabolic(u):
    assert np.array_equal(exp_nilpotent(parabolic_algebra_element(u)), parabolic_matrix(u))


def test_bending_element_examples(rng):
    assert np.allclose(bending_matrix(0.0, 3), np.eye(4))
    assert np.linalg.det(bending_matrix(0.7, 3)) == pytest.approx(1.0)
    c = bending_element(0.7, 3)
    for g in hyperplane_stabilizer_generators(3, rng)[:2]:
        assert np.abs(commutator(c, g)).max() < 1e-9


def test_one_parameter_law(rng):
    for s, t in rng.uniform(-2, 2, size=(100, 2)):
        assert np.allclose(bending_matrix(s, 4) @ bending_matrix(t, 4), bending_matrix(s + t, 4))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_stabilizer_elements_preserve_form_and_wall(d, rng):
    for _ in range(10):
        g = random_hyperplane_stabilizer(d, rng)
        assert preserves_form(g, gram_matrix(d))
        assert preserves_wall(g)


def test_centralizer_shapes(rng):
    d = 4
    u, b = rng.normal(size=d - 1), rng.normal()
    B = parabolic_matrix(u)
    B[0, -1] = b
    res = centralizer_membership(B, "P_d")
    assert res.member and res.shape_ok and res.witness is None
    for which in ("P_d", "P0", "PSO"):
        assert centralizer_membership(np.eye(d + 1), which).member


def test_centralizer_witness_for_random_matrix(rng):
    for _ in range(20):
        B = rng.normal(size=(5, 5))
        for which in ("P_d", "P0"):
            res = centralizer_membership(B, which)
            assert not res.member and res.witness is not None
            assert np.abs(commutator(B, res.witness)).max() > 1e-6


def test_p0_centralizer_example():
    B = np.eye(5)
    B[0, 1], B[1, 1], B[1, -1] = 0.7, 2.0, -0.4
    B[0, 2:4] = [0.3, 0.1]
    B[2:4, -1] = [0.3, 0.1]
    B[0, -1] = 5.0
    assert centralizer_membership(B, "P0").member
    assert not centralizer_membership(B, "P_d").member


def test_hyperbolic_distance_basic(rng):
    x = np.array([1.0, 0.2, 0.0, 1.0])
    assert hyperbolic_distance_Q(x, x) == pytest.approx(0.0, abs=1e-12)
    y = np.array([2.0, -0.5, 0.4, 1.0])
    g = parabolic_matrix([0.3, -2.0])
    assert hyperbolic_distance_Q(g @ x, g @ y) == pytest.approx(hyperbolic_distance_Q(x, y))
    with pytest.raises(DomainError):
        hyperbolic_distance_Q(np.array([0.0, 1.0, 0.0, 1.0]), x)


def test_hyperbolic_distance_matches_arccosh(rng):
    J = gram_matrix(3)
    for _ in range(20):
        v = rng.normal(size=(2, 2))
        h = np.exp(rng.normal(size=2))
        x = np.array([0.5 * v[0] @ v[0] + h[0], *v[0], 1.0])
        y = np.array([0.5 * v[1] @ v[1] + h[1], *v[1], 1.0])
        arg = -(x @ J @ y) / np.sqrt((x @ J @ x) * (y @ J @ y))
        assert hyperbolic_distance_Q(x, y) == pytest.approx(np.arccosh(arg), rel=1e-6)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bending.cusps import (CuspLattice, b_prime_matrix, bent_action, bent_group_matrix,
                           bent_orbit_check, cusp_simplex, cusp_volume_estimate,
                           degenerate_affine_line_witness, length_formulas, omega_x_section,
                           p_prime_matrix, preserves_q_prime, simplex_threshold,
                           standard_density_exact, standard_shell_exact, tabulated_density,
                           translation_orbit_hyperplane)
from bending.domains import BentDomain
from bending.errors import DegenerateSection, DomainError, LatticeError, NotYetDeep
from bending.hilbert import finsler_norm
from bending.projective import ProjectivePoint


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_bent_action_matches_matrix(b, v):
    pt = np.array([2.0, 0.7, -0.4])
    m = bent_group_matrix(b, [v])
    img = m @ np.append(pt, 1.0)
    assert np.allclose(img[:-1] / img[-1], bent_action(b, [v], pt))


def test_bent_group_is_a_homomorphism():
    a = bent_group_matrix(0.3, [1.0, -2.0])
    b = bent_group_matrix(-1.1, [0.5, 0.25])
    ab = a @ b
    assert ab[1, 1] == pytest.approx(np.exp(0.3 - 1.1))


def test_orbits_preserve_levels(rng):
    pts = np.column_stack([rng.uniform(1, 3, 50), np.exp(rng.normal(size=50)), rng.normal(size=50)])
    chk = bent_orbit_check(0.7, [1.3], pts)
    assert chk.max_level_change < 1e-12 and chk.membership_preserved


def test_translation_orbit_lies_in_hyperplane(rng):
    orbit, cov, resid = translation_orbit_hyperplane(np.array([1.0, 2.0, 0.0, 0.5]),
                                                     rng.normal(size=(10, 2)))
    assert resid < 1e-12
    assert np.allclose(orbit[:, 1], 2.0)


def test_prime_groups_preserve_q_prime():
    assert preserves_q_prime(p_prime_matrix(0.8, [0.3]))
    assert not preserves_q_prime(b_prime_matrix(0.4, [0.3]))


def test_omega_section():
    sec = omega_x_section(np.array([-0.5 * 0.0 + 0.5, 1.0, 1.0]))
    assert sec.domain.level == pytest.approx(0.5)
    with pytest.raises(DegenerateSection):
        omega_x_section(ProjectivePoint([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(DomainError):
        omega_x_section(np.array([3.0, 1.0, 0.0]))


@pytest.mark.parametrize("variant", ["P'", "B'"])
@pytest.mark.parametrize("d", [3, 4])
def test_affine_line_witness(variant, d, rng):
    basis = np.eye(d - 1) + 0.2 * rng.normal(size=(d - 1, d - 1))
    wit = degenerate_affine_line_witness(variant, basis)
    assert wit.antipodal
    assert wit.alpha_residual < 1e-6 and wit.beta_residual < 1e-6


def test_affine_line_witness_rejects_flat_basis():
    with pytest.raises(LatticeError):
        degenerate_affine_line_witness("P'", [[1.0, 0.0], [2.0, 0.0]])


def test_length_formula_example():
    w1, _, _, _ = length_formulas(100.0, 1.0, np.zeros(1))
    assert w1 == pytest.approx(0.5)


def test_length_formulas_match_finsler_norms(rng):
    dom = BentDomain(4)
    for _ in range(20):
        x0, y0 = rng.uniform(50, 500), np.exp(rng.uniform(-1, 1))
        v0 = rng.normal(size=2)
        simplex = cusp_simplex(np.array([x0, y0, *v0]))
        assert np.allclose(simplex.norms, simplex.formula_norms, rtol=1e-9)
        assert np.allclose(finsler_norm(dom, np.array([x0, y0, *v0]), simplex.vertices[1]),
                           simplex.formula_norms[0], rtol=1e-9)


def test_simplex_volume_and_depth():
    s = cusp_simplex(np.array([100.0, 1.0, 0.0]), eps=0.1)
    assert s.volume == pytest.approx(0.1 * 100.0 ** 1.5 / 6)
    with pytest.raises(NotYetDeep):
        cusp_simplex(np.array([5.0, 0.01, 0.0]), eps=0.1)


def test_simplex_threshold_is_sufficient():
    thr = simplex_threshold(1.0, np.array([0.5]), eps=0.1)
    for x0 in (thr, 2 * thr, 10 * thr):
        assert np.all(cusp_simplex(np.array([x0, 1.0, 0.5]), eps=0.1).norms < 1.0)


def test_lattice_basics():
    lat = CuspLattice("standard", [[1.0, 0.0], [0.0, 2.0]])
    assert lat.cell_volume == 2.0 and lat.d == 3
    assert lat.depth_offset() == pytest.approx(0.5 * 5.0)
    with pytest.raises(LatticeError):
        CuspLattice("bent", [[1.0, 1.0], [1.0, 1.0]])


def test_standard_shell_exact_matches_table():
    lat = CuspLattice("standard", np.eye(2))
    series = cusp_volume_estimate("standard", 3, lat, X0=4.0, shells=2, samples=200_000, seed=1)
    for X, est in zip(series.X, series.estimates):
        exact = standard_shell_exact(lat, X)
        assert abs(est.value - exact) < 4 * est.stderr + 2e-3 * exact


def test_table_matches_exact_standard_density():
    c = np.geomspace(0.01, 1e3, 9)
    assert np.allclose(tabulated_density("standard", 3, c), standard_density_exact(c, 3), rtol=3e-3)


def test_direct_mode_agrees_with_table():
    lat = CuspLattice("bent", np.eye(1))
    kw = dict(X0=2.0, shells=1, seed=5)
    tab = cusp_volume_estimate("bent", 2, lat, samples=20_000, **kw).estimates[0]
    direct = cusp_volume_estimate("bent", 2, lat, samples=1500, mode="direct", K=256,
                                  **kw).estimates[0]
    assert abs(tab.value - direct.value) < 4 * np.hypot(tab.stderr, direct.stderr)


def test_volume_estimate_deterministic():
    lat = CuspLattice("bent", np.eye(2))
    a = cusp_volume_estimate("bent", 3, lat, shells=2, samples=5000, seed=9)
    b = cusp_volume_estimate("bent", 3, lat, shells=2, samples=5000, seed=9)
    assert np.array_equal(a.values, b.values)

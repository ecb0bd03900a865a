import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bending.errors import IllFormedBending, InputError, WordError
from bending.examples import load_example
from bending.hyperbolic import bending_matrix, random_so_q
from bending.representation import (BendingData, bend, developing_transform, identity_residual,
                                    irreducibility_heuristic, parse_word, word_inverse)

NAMES = ["amalgam_d2", "amalgam_d3", "hnn_d3", "hnn_d4"]


def test_parse_word():
    assert parse_word("a b^-1 a") == [("a", 1), ("b", -1), ("a", 1)]
    assert word_inverse(["a", "b^-1"]) == ["b", "a^-1"]
    with pytest.raises(WordError):
        parse_word(["a", ""])


@pytest.mark.parametrize("name", NAMES)
def test_bundled_examples_bend_cleanly(name):
    data = BendingData.from_dict(load_example(name))
    assert data.delta_in_stabilizer()
    for t in (-1.0, -0.5, 0.0, 0.5, 1.0):
        assert max(bend(data, t).relator_residuals()) < 1e-8


@pytest.mark.parametrize("name", NAMES)
def test_t_zero_is_identity_deformation(name):
    data = BendingData.from_dict(load_example(name))
    rep = bend(data, 0.0)
    for k, v in data.generators.items():
        assert np.array_equal(rep.images[k], v)


def test_roundtrip_dict():
    data = BendingData.from_dict(load_example("hnn_d3"))
    again = BendingData.from_dict(data.to_dict())
    assert again.to_dict() == data.to_dict()


def test_word_evaluation(rng):
    data = BendingData.from_dict(load_example("amalgam_d3"))
    rep = bend(data, 0.3)
    w = ["a1", "b2^-1", "d1"]
    assert identity_residual(rep(w) @ rep(word_inverse(w))) < 1e-10
    assert np.array_equal(rep([]), np.eye(4))
    with pytest.raises(WordError):
        rep(["zz"])


def test_amalgam_conjugates_second_factor():
    data = BendingData.from_dict(load_example("amalgam_d3"))
    t = 0.4
    rep = bend(data, t)
    c = bending_matrix(t, 3)
    assert np.allclose(rep.images["b1"], c @ data.generators["b1"] @ np.linalg.inv(c))
    assert np.array_equal(rep.images["a1"], data.generators["a1"])


def test_ill_formed_delta_rejected(rng):
    doc = load_example("hnn_d3")
    doc["generators"]["q2"] = random_so_q(3, rng).tolist()
    with pytest.raises(IllFormedBending):
        bend(BendingData.from_dict(doc), 0.5)


def test_missing_fields():
    with pytest.raises(InputError):
        BendingData.from_dict({"case": "amalgam"})
    doc = load_example("hnn_d3")
    doc["case"] = "free"
    with pytest.raises(InputError):
        BendingData.from_dict(doc)


@given(st.floats(-1, 1))
def test_developing_sides(t):
    data = BendingData.from_dict(load_example("amalgam_d3"))
    rep = bend(data, t)
    p = np.array([1.0, 0.0, 0.2, 1.0])
    a = developing_transform(rep, [], "N1", p)
    b = developing_transform(rep, [], "N2", p)
    assert a.isclose(b.__class__(p))
    assert b.isclose(b.__class__(bending_matrix(t, 3) @ p))


def test_irreducibility_heuristic(rng):
    data = BendingData.from_dict(load_example("amalgam_d3"))
    assert not irreducibility_heuristic(bend(data, 0.5), words=50).invariant_found
    # block upper triangular matrices share the span of e_1
    mats = [np.triu(rng.normal(size=(4, 4))) + 3 * np.eye(4) for _ in range(3)]
    rep = irreducibility_heuristic(mats, words=20)
    assert rep.invariant_found and rep.dimension == 1
    assert irreducibility_heuristic([2 * np.eye(3)]).degenerate

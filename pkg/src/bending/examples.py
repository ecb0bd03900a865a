"""Builders for the bundled example configurations.

The bending examples are synthetic: factor generators are random
elements of SO(Q_d) and the Delta generators are chosen in the stabilizer
of the wall ``x_2 = 0``, so every relator holds exactly at t = 0 and the
bending is well defined.  The peripheral examples follow a Whitehead-link
style pattern: one cusp meets the bending surface in a single curve, the
other in two oppositely oriented parallel curves.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .cusps import b_prime_matrix, p_prime_matrix
from .hyperbolic import parabolic_matrix, random_hyperplane_stabilizer, random_so_q


def _m(a):
    return np.asarray(a, float).tolist()


def amalgam_example(d=3, seed=11):
    rng = np.random.default_rng(seed)
    trans = np.zeros(d - 1)
    if d >= 3:
        trans[-1] = 1.0
    d1 = parabolic_matrix(trans)
    d2 = random_hyperplane_stabilizer(d, rng, scale=0.3)
    a1, a2 = random_so_q(d, rng, scale=0.3), random_so_q(d, rng, scale=0.3)
    b1, b2 = random_so_q(d, rng, scale=0.3), random_so_q(d, rng, scale=0.3)
    gens = {"a1": a1, "a2": a2, "d1": d1, "d2": d2, "c": a1 @ d1 @ np.linalg.inv(a1),
            "b1": b1, "b2": b2, "e1": d1, "e2": d2, "k": b1 @ d2 @ np.linalg.inv(b1)}
    return {
        "name": f"amalgam_d{d}",
        "case": "amalgam",
        "dimension": d,
        "generators": {k: _m(v) for k, v in gens.items()},
        "factor1": ["a1", "a2", "d1", "d2", "c"],
        "factor2": ["b1", "b2", "e1", "e2", "k"],
        "delta": ["d1", "d2", "e1", "e2"],
        "relators": [["d1", "e1^-1"], ["d2", "e2^-1"],
                     ["a1", "d1", "a1^-1", "c^-1"], ["b1", "e2", "b1^-1", "k^-1"],
                     ["a2", "d1", "e2", "d1^-1", "a2^-1", "a2", "d1", "e2^-1", "d1^-1", "a2^-1"]],
    }


def hnn_example(d=3, seed=12):
    rng = np.random.default_rng(seed)
    trans = np.zeros(d - 1)
    if d >= 3:
        trans[-1] = 1.0
    q1 = parabolic_matrix(trans)
    q2 = random_hyperplane_stabilizer(d, rng, scale=0.3)
    s = random_so_q(d, rng, scale=0.3)
    s_inv = np.linalg.inv(s)
    a1, a2 = random_so_q(d, rng, scale=0.3), random_so_q(d, rng, scale=0.3)
    gens = {"a1": a1, "a2": a2, "q1": q1, "q2": q2,
            "r1": s_inv @ q1 @ s, "r2": s_inv @ q2 @ s, "s": s}
    return {
        "name": f"hnn_d{d}",
        "case": "hnn",
        "dimension": d,
        "generators": {k: _m(v) for k, v in gens.items()},
        "stable_letter": "s",
        "delta": ["q1", "q2"],
        "relators": [["s", "r1", "s^-1", "q1^-1"], ["s", "r2", "s^-1", "q2^-1"]],
    }


def _cusp(name, d, crossings, translation=1.0, delta_len=1.0, gamma=None):
    delta = []
    for i in range(1, d - 1):
        u = np.zeros(d - 1)
        u[i] = delta_len
        delta.append(u.tolist())
    if gamma is None:
        v = np.zeros(d - 1)
        v[0] = translation
        if d >= 3:
            v[1] = 0.3
        gamma = parabolic_matrix(v)
    return {"name": name, "dimension": d, "delta": delta, "gamma": _m(gamma),
            "crossings": [list(c) for c in crossings]}


def whitehead_example(d=3):
    return {"name": "whitehead", "dimension": d,
            "cusps": [_cusp("T1", d, [(0.5, 1)]),
                      _cusp("T2", d, [(0.25, 1), (0.75, -1)])]}


def separating_example(d=3):
    """Every cusp meets the surface in as many positive as negative curves."""
    return {"name": "separating", "dimension": d,
            "cusps": [_cusp("C1", d, []),
                      _cusp("C2", d, [(0.2, 1), (0.6, -1)]),
                      _cusp("C3", d, [(0.1, -1), (0.3, 1), (0.5, 1), (0.9, -1)])]}


def degenerate_examples(d=3):
    u = np.zeros(d - 2)
    u[0] = 0.3
    return {
        "p_prime": {"name": "p_prime", "dimension": d,
                    "cusps": [_cusp("Pprime", d, [], gamma=p_prime_matrix(1.0, u))]},
        "b_prime": {"name": "b_prime", "dimension": d,
                    "cusps": [_cusp("Bprime", d, [], gamma=b_prime_matrix(0.4, u))]},
    }


def volume_examples():
    return {
        "volume_bent_d3": {"kind": "bent", "dimension": 3, "basis": [[1.0, 0.0], [0.0, 1.0]],
                           "shells": 9, "samples": 1000000},
        "volume_bent_d2": {"kind": "bent", "dimension": 2, "basis": [[1.0]],
                           "shells": 12, "samples": 1000000},
        "volume_standard_d3": {"kind": "standard", "dimension": 3,
                               "basis": [[1.0, 0.0], [0.0, 1.0]], "shells": 9,
                               "samples": 1000000},
    }


def plot_examples():
    return {
        "plot_slice": {"plot": "slice", "dimension": 3},
        "plot_section": {"plot": "section", "point": [0.0, 1.0, 0.0]},
        "plot_circle": {"plot": "circle", "crossings": [[0.5, 1]], "t": 0.7},
    }


def sandwich_examples():
    return {
        "sandwich_paraboloid": {"kind": "standard", "dimension": 3,
                                "basis": [[1.0, 0.0], [0.0, 1.0]],
                                "domain": {"type": "paraboloid"}},
        "sandwich_perturbed": {"kind": "standard", "dimension": 3,
                               "basis": [[1.0, 0.0], [0.0, 1.0]],
                               "domain": {"type": "perturbed", "amplitude": 0.3}},
        "sandwich_bent": {"kind": "bent", "dimension": 3,
                          "basis": [[1.0, 0.0], [0.0, 1.0]],
                          "domain": {"type": "bent_perturbed", "amplitude_per_t": 0.2}},
    }


def all_examples():
    out = {"amalgam_d3": amalgam_example(3), "hnn_d3": hnn_example(3),
           "amalgam_d2": amalgam_example(2), "hnn_d4": hnn_example(4),
           "whitehead": whitehead_example(3), "separating": separating_example(3),
           "whitehead_d4": whitehead_example(4)}
    out.update(degenerate_examples(3))
    out.update(volume_examples())
    out.update(plot_examples())
    out.update(sandwich_examples())
    return out


def data_path(name):
    """Path of a bundled example file (``name`` without the .json suffix)."""
    return resources.files("bending") / "data" / f"{name}.json"


def load_example(name):
    return json.loads(data_path(name).read_text())

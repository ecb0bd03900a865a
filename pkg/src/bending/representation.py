"""Bending a holonomy representation along a totally geodesic wall.

The wall is the hyperplane ``x_2 = 0``; its stabilizer contains the
subgroup Delta, and the bending path ``c_t`` centralizes that stabilizer.
For an amalgam ``Gamma_1 *_Delta Gamma_2`` the generators of the second
factor are conjugated by ``c_t``; for an HNN extension the stable letter
is multiplied on the left by ``c_t``.  Representations are kept as
generator images together with a word evaluator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, IllFormedBending, InputError, WordError
from .hyperbolic import bending_matrix, gram_matrix, preserves_form, preserves_wall
from .projective import ProjectiveMap, ProjectivePoint

INVERSE_SUFFIX = "^-1"
RELATOR_TOL = 1e-8


def _normalize(mat):
    mat = np.asarray(mat, dtype=float)
    return mat / abs(np.linalg.det(mat)) ** (1.0 / mat.shape[0])


def parse_word(word):
    """A word as a list of ``(name, exponent)`` pairs.

    Accepts a list of symbols or a whitespace separated string; the
    suffix ``^-1`` marks an inverse.
    """
    if isinstance(word, str):
        word = word.split()
    out = []
    for sym in word:
        if not isinstance(sym, str) or not sym:
            raise WordError(f"bad symbol {sym!r}")
        if sym.endswith(INVERSE_SUFFIX):
            out.append((sym[: -len(INVERSE_SUFFIX)], -1))
        else:
            out.append((sym, 1))
    return out


def word_inverse(word):
    return [name if e < 0 else name + INVERSE_SUFFIX for name, e in reversed(parse_word(word))]


def identity_residual(mat):
    """Distance of a matrix to +I or -I (sign ambiguity of PGL classes)."""
    mat = _normalize(mat)
    eye = np.eye(mat.shape[0])
    return float(min(np.abs(mat - eye).max(), np.abs(mat + eye).max()))


@dataclass
class BendingData:
    """Generator images of rho_0 and the splitting they come with."""

    case: str
    dimension: int
    generators: dict
    delta: list
    relators: list
    stable_letter: str | None = None
    factor1: list | None = None
    factor2: list | None = None
    name: str = ""

    def __post_init__(self):
        if self.case not in ("amalgam", "hnn"):
            raise InputError(f"case must be 'amalgam' or 'hnn', got {self.case!r}")
        d = int(self.dimension)
        self.generators = {k: _normalize(v) for k, v in self.generators.items()}
        for k, v in self.generators.items():
            if v.shape != (d + 1, d + 1):
                raise DimensionError(f"generator {k} has shape {v.shape}, expected {(d + 1, d + 1)}")
        self.delta = [parse_word(w) if not isinstance(w, str) or " " in w else parse_word([w])
                      for w in self.delta]
        self.relators = [parse_word(r) for r in self.relators]
        if self.case == "hnn":
            if self.stable_letter not in self.generators:
                raise InputError("HNN data needs a stable letter among the generators")
        else:
            if self.factor2 is None:
                raise InputError("amalgam data needs the list 'factor2' of second-factor generators")
            if self.factor1 is None:
                self.factor1 = [g for g in self.generators if g not in self.factor2]
        for word in self.relators + self.delta:
            for sym, _ in word:
                if sym not in self.generators:
                    raise WordError(f"unknown generator {sym!r}")

    # -- serialization ----------------------------------------------------
    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(case=doc["case"], dimension=doc["dimension"],
                       generators={k: np.array(v, float) for k, v in doc["generators"].items()},
                       delta=list(doc.get("delta", [])),
                       relators=list(doc.get("relators", [])),
                       stable_letter=doc.get("stable_letter"),
                       factor1=doc.get("factor1"), factor2=doc.get("factor2"),
                       name=doc.get("name", ""))
        except KeyError as exc:
            raise InputError(f"missing field {exc.args[0]!r}") from exc

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        def word_syms(w):
            return [n if e > 0 else n + INVERSE_SUFFIX for n, e in w]

        doc = {"case": self.case, "dimension": int(self.dimension),
               "generators": {k: v.tolist() for k, v in self.generators.items()},
               "delta": [word_syms(w) for w in self.delta],
               "relators": [word_syms(r) for r in self.relators]}
        if self.stable_letter is not None:
            doc["stable_letter"] = self.stable_letter
        if self.factor1 is not None:
            doc["factor1"] = list(self.factor1)
        if self.factor2 is not None:
            doc["factor2"] = list(self.factor2)
        if self.name:
            doc["name"] = self.name
        return doc

    # -- checks ---------------------------------------------------------
    def delta_in_stabilizer(self, tol=1e-8):
        """Each Delta element preserves Q_d and the wall ``x_2 = 0``."""
        J = gram_matrix(self.dimension)
        rep = BentRepresentation(self, 0.0, dict(self.generators))
        out = []
        for w in self.delta:
            g = rep.evaluate(w)
            g = g / np.sign(g[-1, -1] or 1.0)
            out.append(preserves_form(g, J, tol) and preserves_wall(g, tol))
        return all(out)


@dataclass
class BentRepresentation:
    data: BendingData
    t: float
    images: dict = field(repr=False)

    @property
    def dimension(self):
        return self.data.dimension

    def __call__(self, word):
        return self.evaluate(word)

    def evaluate(self, word):
        return evaluate_word(self, word)

    def relator_residuals(self):
        return [identity_residual(self.evaluate(r)) for r in self.data.relators]


def evaluate_word(rep, word):
    """Left-to-right product of generator images; the empty word is I."""
    out = np.eye(rep.dimension + 1)
    for name, e in parse_word(word) if not _is_parsed(word) else word:
        try:
            m = rep.images[name]
        except KeyError:
            raise WordError(f"unknown generator {name!r}") from None
        out = out @ (m if e > 0 else np.linalg.inv(m))
    return out


def _is_parsed(word):
    return isinstance(word, list) and (not word or isinstance(word[0], tuple))


def bend(data, t, tol=RELATOR_TOL, check=True):
    """The bent representation rho_t.

    Delta must be centralized by ``c_t``; this is verified first and the
    relators are re-evaluated afterwards.  Both failures raise
    IllFormedBending.
    """
    d = data.dimension
    if t == 0:
        return BentRepresentation(data, 0.0, dict(data.generators))
    c = bending_matrix(t, d)
    c_inv = bending_matrix(-t, d)
    base = BentRepresentation(data, 0.0, dict(data.generators))
    if check:
        for w in data.delta:
            g = base.evaluate(w)
            comm = np.abs(c @ g - g @ c).max() / (np.abs(c).max() * np.abs(g).max())
            if comm > tol:
                raise IllFormedBending(f"c_t does not centralize Delta element {w} (residual {comm:.3g})")
    images = dict(data.generators)
    if data.case == "amalgam":
        for name in data.factor2:
            images[name] = _normalize(c @ data.generators[name] @ c_inv)
    else:
        s = data.stable_letter
        images[s] = _normalize(c @ data.generators[s])
    rep = BentRepresentation(data, float(t), images)
    if check:
        res = rep.relator_residuals()
        if res and max(res) > tol:
            raise IllFormedBending(f"relator residual {max(res):.3g} exceeds {tol}")
    return rep


def developing_transform(rep, gamma_word, side, point):
    """Image of a point of a tile ``(gamma, side)`` under the bent developing map.

    ``point`` is ``D_0(p)``.  On the first side (and in the HNN case) the
    result is ``rho_t(gamma) D_0(p)``; on the second side of an amalgam it
    is ``rho_t(gamma) c_t D_0(p)``.
    """
    coords = point.coords if isinstance(point, ProjectivePoint) else np.asarray(point, float)
    g = rep.evaluate(gamma_word)
    if rep.data.case == "amalgam" and side in ("N2", 2, "2"):
        g = g @ bending_matrix(rep.t, rep.dimension)
    elif side not in ("N1", "N", 1, "1"):
        raise InputError(f"unknown side {side!r}")
    return ProjectivePoint(g @ coords)


# ---------------------------------------------------------------------------
# irreducibility


@dataclass
class IrreducibilityReport:
    invariant_found: bool
    dimension: int | None
    basis: np.ndarray | None
    degenerate: bool = False
    words_tried: int = 0

    @property
    def summary(self):
        if self.degenerate:
            return "degenerate: every generator is scalar"
        if self.invariant_found:
            return f"candidate invariant subspace of dimension {self.dimension}"
        return "no invariant subspace found"


def _closure(vectors, mats, tol):
    """Smallest subspace containing ``vectors`` and invariant under ``mats``."""
    n = mats[0].shape[0]
    span = np.zeros((0, n))

    def add(vs):
        nonlocal span
        stack = np.vstack([span, vs]) if span.size else np.atleast_2d(vs)
        u, s, vt = np.linalg.svd(stack, full_matrices=False)
        rank = int(np.sum(s > tol * max(s[0], 1e-300)))
        new = vt[:rank]
        grew = rank > span.shape[0]
        span = new
        return grew

    add(vectors)
    for _ in range(n + 1):
        if span.shape[0] == n:
            break
        images = np.vstack([span @ m.T for m in mats])
        if not add(images):
            break
    return span


def irreducibility_heuristic(rep_or_mats, words=200, trials=None, seed=0, max_len=6, tol=1e-8):
    """Search for a common invariant subspace by closing eigenvector spans.

    Eigenvectors (real and imaginary parts) of random words are closed
    under the generators; a proper closed subspace is a candidate.  A
    negative answer is evidence, not proof.
    """
    if isinstance(rep_or_mats, BentRepresentation):
        mats = [np.asarray(m) for m in rep_or_mats.images.values()]
    else:
        mats = [np.asarray(m.matrix if isinstance(m, ProjectiveMap) else m, float)
                for m in rep_or_mats]
    n = mats[0].shape[0]
    if all(np.abs(m - m[0, 0] * np.eye(n)).max() <= tol * np.abs(m).max() for m in mats):
        return IrreducibilityReport(True, 1, np.eye(n)[:1], degenerate=True)
    words = trials if trials is not None else words
    gens = mats + [np.linalg.inv(m) for m in mats]
    rng = np.random.default_rng(seed)
    candidates = [mats[i] for i in range(len(mats))]
    for _ in range(words):
        length = int(rng.integers(1, max_len + 1))
        w = np.eye(n)
        for k in rng.integers(0, len(gens), size=length):
            w = w @ gens[k]
        candidates.append(w)
    best = None
    for w in candidates:
        _, vecs = np.linalg.eig(w)
        for j in range(n):
            v = vecs[:, j]
            parts = [p for p in (v.real, v.imag) if np.linalg.norm(p) > 1e-12]
            if not parts:
                continue
            span = _closure(np.array(parts), mats, 1e-7)
            if span.shape[0] < n and (best is None or span.shape[0] < best.shape[0]):
                best = span
    if best is None:
        return IrreducibilityReport(False, None, None, words_tried=len(candidates))
    return IrreducibilityReport(True, int(best.shape[0]), best, words_tried=len(candidates))


def load_bending_data(path):
    return BendingData.load(Path(path))

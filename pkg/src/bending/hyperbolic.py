"""The paraboloid model of H^d and the matrix groups that fix infinity.

Coordinates are indexed 1..d+1 in the comments (numpy indices 0..d).
The form is ``Q_d(x) = x_2^2 + ... + x_d^2 - 2 x_1 x_{d+1}`` and the model
is its negative cone seen in the patch ``x_{d+1} = 1``, i.e. the epigraph
``x_1 > |v|^2 / 2`` with ``v = (x_2, ..., x_d)``.  Infinity is ``[e_1]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import projective
from .errors import DimensionError, DomainError
from .projective import ProjectiveMap, ProjectivePoint


class Membership(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


def gram_matrix(d):
    """Gram matrix J of ``Q_d``, so that ``Q_d(x) = x^T J x``."""
    J = np.eye(d + 1)
    J[0, 0] = J[d, d] = 0.0
    J[0, d] = J[d, 0] = -1.0
    return J


def gram_matrix_prime(d):
    """Gram matrix of ``Q'_d = -x_2^2 + x_3^2 + ... - 2 x_1 x_{d+1}``."""
    J = gram_matrix(d)
    J[1, 1] = -1.0
    return J


@dataclass(frozen=True)
class QuadraticFormQ:
    d: int

    @property
    def gram(self):
        return gram_matrix(self.d)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.gram, x)

    def bilinear(self, x, y):
        return np.einsum("...i,ij,...j->...", np.asarray(x, float), self.gram,
                         np.asarray(y, float))

    def signature(self):
        eig = np.linalg.eigvalsh(self.gram)
        return int((eig > 0).sum()), int((eig < 0).sum())


def _vec(x):
    return x.coords if isinstance(x, ProjectivePoint) else np.asarray(x, dtype=float)


def hyperboloid_membership(x, tol=None):
    """Classify a homogeneous point against the paraboloid model."""
    tol = projective.TOLERANCE if tol is None else tol
    vec = _vec(x)
    vec = vec / np.linalg.norm(vec)
    q = QuadraticFormQ(vec.size - 1)(vec)
    if abs(q) <= tol:
        return Membership.BOUNDARY
    return Membership.INTERIOR if q < 0 else Membership.EXTERIOR


def parabolic_matrix(v):
    """Block matrix ``(1, v^T, |v|^2/2 / 0, I, v / 0, 0, 1)``."""
    v = np.asarray(v, dtype=float).ravel()
    n = v.size + 2
    m = np.eye(n)
    m[0, 1:-1] = v
    m[1:-1, -1] = v
    m[0, -1] = 0.5 * (v @ v)
    return m


def make_parabolic(v, d=None):
    """Element of P_d with translation vector ``v`` (length d-1)."""
    v = np.asarray(v, dtype=float).ravel()
    if d is not None and v.size != d - 1:
        raise DimensionError(f"translation vector must have length {d - 1}, got {v.size}")
    return ProjectiveMap(parabolic_matrix(v))


def parabolic_algebra_element(u):
    """Nilpotent element of the Lie algebra p_d with data ``u``."""
    u = np.asarray(u, dtype=float).ravel()
    n = u.size + 2
    X = np.zeros((n, n))
    X[0, 1:-1] = u
    X[1:-1, -1] = u
    return X


def exp_nilpotent(X):
    """``exp(X)`` for ``X^3 = 0``: the finite sum ``I + X + X^2/2``."""
    return np.eye(X.shape[0]) + X + 0.5 * (X @ X)


def bending_generator(d):
    """Infinitesimal generator ``C = diag(-1, d, -1, ..., -1)``."""
    diag = -np.ones(d + 1)
    diag[1] = d
    return np.diag(diag)


def bending_matrix(t, d):
    """``exp(tC)`` in closed form (diagonal, determinant one)."""
    diag = np.full(d + 1, np.exp(-t))
    diag[1] = np.exp(d * t)
    return np.diag(diag)


def bending_element(t, d):
    return ProjectiveMap(bending_matrix(t, d))


def commutator(a, b):
    """Matrix commutator ``ab - ba``.

    For ``a`` in the centralizer of ``b`` this vanishes; it equals
    ``aba^{-1}b^{-1} - I`` up to right multiplication by ``(ba)^{-1}``.
    """
    a = a.matrix if isinstance(a, ProjectiveMap) else np.asarray(a, float)
    b = b.matrix if isinstance(b, ProjectiveMap) else np.asarray(b, float)
    return a @ b - b @ a


def preserves_form(g, gram, tol=1e-9):
    g = g.matrix if isinstance(g, ProjectiveMap) else np.asarray(g, float)
    # PGL class: rescale so that the form is preserved up to a positive scalar
    lhs = g.T @ gram @ g
    return np.linalg.norm(lhs - gram) <= tol * max(1.0, np.linalg.norm(lhs))


# -- generators of the subgroups -------------------------------------------

def p_d_basis(d):
    """Unit translations spanning P_d."""
    return [make_parabolic(e) for e in np.eye(d - 1)]


def p0_basis(d):
    """Unit translations spanning P^0_{d-1} (first translation entry zero)."""
    return [make_parabolic(e) for e in np.eye(d - 1)[1:]]


def cayley(X):
    """Cayley transform ``(I - X)^{-1}(I + X)``; maps so(Q) into SO(Q)."""
    n = X.shape[0]
    return np.linalg.solve(np.eye(n) - X, np.eye(n) + X)


def random_so_q(d, rng, scale=0.5, gram=None):
    """A random element of SO(Q) near the identity (Cayley of a random X)."""
    J = gram_matrix(d) if gram is None else gram
    S = rng.normal(scale=scale, size=(d + 1, d + 1))
    S = S - S.T
    # J^2 = I, so X = J S satisfies X^T J + J X = 0
    return cayley(np.linalg.solve(J, S))


def random_hyperplane_stabilizer(d, rng, scale=0.5):
    """Random element of PSO(Q_d; d-1, 1): identity on e_2, SO on the rest.

    The restriction of Q_d to the coordinates other than x_2 is again of
    the same shape, so the Cayley construction applies there.
    """
    idx = [i for i in range(d + 1) if i != 1]
    J = gram_matrix(d)[np.ix_(idx, idx)]
    S = rng.normal(scale=scale, size=(d, d))
    S = S - S.T
    block = cayley(np.linalg.solve(J, S))
    g = np.eye(d + 1)
    g[np.ix_(idx, idx)] = block
    return g


def hyperplane_stabilizer_generators(d, rng=None, count=3):
    """A finite generating list for a dense subgroup of PSO(Q_d; d-1, 1)."""
    rng = np.random.default_rng(0) if rng is None else rng
    gens = [g.matrix for g in p0_basis(d)]
    lam = 2.0
    dil = np.eye(d + 1)
    dil[0, 0], dil[d, d] = lam, 1.0 / lam
    gens.append(dil)
    gens.extend(random_hyperplane_stabilizer(d, rng) for _ in range(count))
    return [ProjectiveMap(g) for g in gens]


def preserves_wall(g, tol=1e-9):
    """Spot check: g maps the hyperplane ``x_2 = 0`` to itself."""
    g = g.matrix if isinstance(g, ProjectiveMap) else np.asarray(g, float)
    row = g[1].copy()
    row[1] = 0.0
    return np.abs(row).max() <= tol * np.abs(g).max()


# -- centralizers ------------------------------------------------------------

CENTRALIZER_KINDS = ("PSO", "P_d", "P0")


def normalize_unipotent(B):
    """Scale a PGL representative so that its (1,1) entry is 1."""
    B = B.matrix if isinstance(B, ProjectiveMap) else np.asarray(B, float)
    if abs(B[0, 0]) <= projective.TOLERANCE * np.abs(B).max():
        return B
    return B / B[0, 0]


def matches_pd_centralizer_shape(B, tol=1e-9):
    """Shape ``(1, u^T, b / 0, I, u / 0, 0, 1)`` of the P_d centralizer."""
    B = normalize_unipotent(B)
    n = B.shape[0]
    ref = np.eye(n)
    u = B[0, 1:-1]
    ref[0, 1:-1] = u
    ref[1:-1, -1] = u
    ref[0, -1] = B[0, -1]
    return np.abs(B - ref).max() <= tol * max(1.0, np.abs(B).max())


def matches_p0_centralizer_shape(B, tol=1e-9):
    """Shape ``(1, a, u^T, z / 0, b, 0, c / 0, 0, I, u / 0, 0, 0, 1)``."""
    B = normalize_unipotent(B)
    n = B.shape[0]
    ref = np.eye(n)
    ref[0, 1:] = B[0, 1:]
    ref[1, 1] = B[1, 1]
    ref[1, -1] = B[1, -1]
    ref[2:-1, -1] = B[0, 2:-1]
    if abs(B[1, 1]) <= tol:
        return False
    return np.abs(B - ref).max() <= tol * max(1.0, np.abs(B).max())


@dataclass
class CentralizerResult:
    member: bool
    shape_ok: bool
    witness: np.ndarray | None
    residual: float

    def __bool__(self):
        return self.member


def centralizer_membership(B, which, generators=None, tol=1e-9):
    """Does ``B`` centralize P_d, P^0_{d-1} or a generator list of PSO?

    Membership is decided by commutators with a generating set; for the
    unipotent groups the unit translations suffice because commuting with
    ``exp(X)`` is the same as commuting with ``X``.  The witness is the
    generator with the largest commutator when B is not a member.
    """
    mat = B.matrix if isinstance(B, ProjectiveMap) else np.asarray(B, float)
    d = mat.shape[0] - 1
    if which == "P_d":
        gens = p_d_basis(d)
        shape_ok = matches_pd_centralizer_shape(mat, tol)
    elif which == "P0":
        gens = p0_basis(d)
        shape_ok = matches_p0_centralizer_shape(mat, tol)
    elif which == "PSO":
        gens = generators if generators is not None else hyperplane_stabilizer_generators(d)
        shape_ok = None
    else:
        raise ValueError(f"unknown centralizer {which!r}; expected one of {CENTRALIZER_KINDS}")

    scale = np.abs(mat).max()
    worst, witness = 0.0, None
    for g in gens:
        gm = g.matrix if isinstance(g, ProjectiveMap) else np.asarray(g, float)
        res = np.abs(commutator(mat, gm)).max() / (scale * np.abs(gm).max())
        if res > worst:
            worst, witness = res, gm
    member = worst <= tol
    if shape_ok is None:
        shape_ok = member
    return CentralizerResult(member, shape_ok, None if member else witness, worst)


# -- distances ---------------------------------------------------------------

def _interior_reps(x):
    """Representatives normalized to ``Q = -1`` on the x_{d+1} > 0 sheet."""
    vec = np.asarray(_vec(x), dtype=float)
    d = vec.shape[-1] - 1
    q = QuadraticFormQ(d)(vec)
    if np.any(q >= 0):
        raise DomainError("point is not interior to the paraboloid model")
    sign = np.sign(vec[..., -1])
    return vec * (sign / np.sqrt(-q))[..., None]


def hyperbolic_distance_Q(x, y):
    """Hyperbolic distance from the bilinear form of ``Q_d``.

    Uses ``Q(x - y) = 4 sinh^2(d/2)`` for representatives with ``Q = -1``,
    which is stable for nearby points (``arccosh`` is not).
    """
    xr, yr = _interior_reps(x), _interior_reps(y)
    d = xr.shape[-1] - 1
    q = QuadraticFormQ(d)(xr - yr)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(q, 0.0)))


def paraboloid_density(x):
    """Riemannian volume density of H^d in the patch coordinates ``(x_1, v)``.

    ``(2 x_1 - |v|^2)^{-(d+1)/2}``; used as an independent oracle for the
    Busemann density of the paraboloid.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    h2 = 2.0 * x[..., 0] - np.sum(x[..., 1:] ** 2, axis=-1)
    return h2 ** (-(d + 1) / 2.0)

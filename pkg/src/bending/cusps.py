"""Model cusps: standard horoballs, the bent domain and their groups.

Affine coordinates on the bent side are ``(x, y, v)`` with ``v`` of length
d-2; on the standard side they are ``(x, v)`` with ``v`` of length d-1.
The group B_d acts on the bent domain preserving every horosphere
``x - |v|^2/2 + log y = c``, and P_d does the same for the standard
horospheres ``x - |v|^2/2 = c``.  Both facts are used to turn Busemann
volume integrals over cusp shells into one-dimensional tables.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .domains import BentDomain, Paraboloid, Region, as_affine
from .errors import (DegenerateSection, DimensionError, DomainError, LatticeError,
                     NotYetDeep)
from .hilbert import (VolumeEstimate, busemann_unit_ball_volume, busemann_volume,
                      finsler_norm, unit_ball_volume)
from .hyperbolic import Membership, gram_matrix_prime, parabolic_matrix
from .projective import ProjectiveMap, ProjectivePoint


# ---------------------------------------------------------------------------
# group elements


def bent_group_matrix(b, v):
    """Element of B_d: translation v (length d-2) and dilation log b."""
    v = np.asarray(v, dtype=float).ravel()
    n = v.size + 3
    m = np.eye(n)
    m[0, 2:-1] = v
    m[0, -1] = 0.5 * (v @ v) - b
    m[1, 1] = np.exp(b)
    m[2:-1, -1] = v
    return m


def bent_group_element(b, v, d=None):
    v = np.asarray(v, dtype=float).ravel()
    if d is not None and v.size != d - 2:
        raise DimensionError(f"translation part must have length {d - 2}, got {v.size}")
    return ProjectiveMap(bent_group_matrix(b, v))


def bent_action(b, v, points):
    """Affine action of the B_d element (b, v) on points ``(x, y, v')``."""
    pts = np.asarray(points, dtype=float)
    v = np.asarray(v, dtype=float)
    out = pts.copy()
    out[..., 0] = pts[..., 0] + pts[..., 2:] @ v + 0.5 * (v @ v) - b
    out[..., 1] = np.exp(b) * pts[..., 1]
    out[..., 2:] = pts[..., 2:] + v
    return out


@dataclass
class OrbitCheck:
    max_level_change: float
    membership_preserved: bool


def bent_orbit_check(b, v, points, domain=None):
    """Apply (b, v) to sample points; report level drift and membership."""
    pts = np.atleast_2d(np.asarray(points, float))
    domain = BentDomain(pts.shape[1]) if domain is None else domain
    img = bent_action(b, v, pts)
    drift = np.abs(domain.level_of(img) - domain.level_of(pts))
    same = np.array_equal(domain.contains(pts), domain.contains(img))
    return OrbitCheck(float(np.max(drift)), bool(same))


def translation_orbit_hyperplane(point, translations):
    """Orbit of a point under pure translations and the hyperplane holding it.

    Pure translations fix the y coordinate, so the orbit lies in the affine
    hyperplane ``y = y_0``; within it the boundary of B^d is a paraboloid,
    i.e. a quadric bounding a copy of H^{d-1}.  Returns the orbit, the
    covector of that hyperplane, and the largest incidence residual.
    """
    point = np.asarray(point, float)
    orbit = np.array([bent_action(0.0, t, point) for t in np.atleast_2d(translations)])
    cov = np.zeros(point.size + 1)
    cov[1], cov[-1] = 1.0, -point[1]
    homog = np.column_stack([orbit, np.ones(len(orbit))])
    return orbit, cov, float(np.max(np.abs(homog @ cov)))


def p_prime_matrix(a, u):
    """Element of P'_d; preserves ``Q'_d = -x_2^2 + x_3^2 + ... - 2 x_1 x_{d+1}``."""
    u = np.asarray(u, dtype=float).ravel()
    n = u.size + 3
    m = np.eye(n)
    m[0, 1] = a
    m[0, 2:-1] = u
    m[0, -1] = 0.5 * (-a * a + u @ u)
    m[1, -1] = -a
    m[2:-1, -1] = u
    return m


def b_prime_matrix(t, u):
    """Element of B'_d: like B_d but with the opposite sign on the log term."""
    u = np.asarray(u, dtype=float).ravel()
    n = u.size + 3
    m = np.eye(n)
    m[0, 2:-1] = u
    m[0, -1] = 0.5 * (u @ u) + t
    m[1, 1] = np.exp(t)
    m[2:-1, -1] = u
    return m


def preserves_q_prime(g, tol=1e-9):
    g = g.matrix if isinstance(g, ProjectiveMap) else np.asarray(g, float)
    J = gram_matrix_prime(g.shape[0] - 1)
    return float(np.abs(g.T @ J @ g - J).max()) <= tol


# ---------------------------------------------------------------------------
# two-dimensional sections


@dataclass
class Section2D:
    """The plane through a boundary point x and the segment s_inf.

    In affine coordinates the plane is ``{(x', y', v_0)}``, so the section
    is the two-dimensional bent domain of level ``|v_0|^2/2``.
    """

    base_point: np.ndarray
    domain: BentDomain

    def embed(self, pts2):
        pts2 = np.atleast_2d(np.asarray(pts2, float))
        v0 = np.broadcast_to(self.base_point[2:], (pts2.shape[0], self.base_point.size - 2))
        return np.column_stack([pts2, v0])


def omega_x_section(x, d=None, tol=1e-9):
    """Section of B^d by the plane spanned by a boundary point and s_inf."""
    if isinstance(x, ProjectivePoint) and abs(x.coords[-1]) <= tol:
        raise DegenerateSection("the base point lies on the segment s_inf")
    x = as_affine(x, d)
    dom = BentDomain(x.size)
    if dom.membership(x, tol=tol) != Membership.BOUNDARY:
        raise DomainError("the base point must lie on the boundary of B^d")
    level = 0.5 * float(np.sum(x[2:] ** 2))
    return Section2D(np.array(x, float), BentDomain(2, level=level))


# ---------------------------------------------------------------------------
# degenerate lattices: the affine line witnesses


@dataclass
class AffineLineWitness:
    variant: str
    alpha_points: np.ndarray   # sphere-lift orbit points, one per n
    beta_points: np.ndarray
    alpha_limit: np.ndarray
    beta_limit: np.ndarray
    alpha_residual: float
    beta_residual: float

    @property
    def antipodal(self):
        return bool(np.allclose(self.alpha_limit, -self.beta_limit))


def _babai(basis, target):
    coef = np.rint(np.linalg.solve(basis.T, target))
    return coef @ basis


def degenerate_affine_line_witness(variant, basis, n_max=40, schedule="geometric"):
    """Orbit sequences of a P'_d or B'_d lattice converging to [e_1] and [-e_1].

    ``basis`` holds d-1 parameter vectors ``(a, u)`` (P') or ``(t, u)`` (B').
    The alpha sequence sends the u part to infinity with the first
    parameter bounded, the beta sequence sends ``a`` to +infinity (P') or
    ``t`` to -infinity (B').  Lattice points near the targets are found by
    rounding coordinates in the basis; a geometric schedule ``2^n`` makes
    the residual decay like ``2^{-n}``.
    """
    basis = np.atleast_2d(np.asarray(basis, float))
    k = basis.shape[1]
    if basis.shape[0] != k or k < 2 or abs(np.linalg.det(basis)) < 1e-12:
        raise LatticeError("basis does not span the parameter space")
    d = k + 1
    if variant in ("P'", "P_prime", "p_prime"):
        variant, build = "P'", p_prime_matrix
        base = np.zeros(d + 1)
        base[-1] = 1.0
        beta_sign = 1.0
    elif variant in ("B'", "B_prime", "b_prime"):
        variant, build = "B'", b_prime_matrix
        base = np.zeros(d + 1)
        base[1] = base[-1] = 1.0
        beta_sign = -1.0
    else:
        raise ValueError(f"unknown variant {variant!r}")

    ns = np.arange(1, n_max + 1)
    scale = 2.0 ** ns if schedule == "geometric" else ns.astype(float)
    e1 = np.zeros(d + 1)
    e1[0] = 1.0

    def orbit(targets):
        pts = []
        for tgt in targets:
            p = _babai(basis, tgt)
            w = build(p[0], p[1:]) @ base
            pts.append(w / np.linalg.norm(w))
        return np.array(pts)

    u_dir = np.zeros(k)
    u_dir[1] = 1.0
    f_dir = np.zeros(k)
    f_dir[0] = beta_sign
    alpha = orbit(s * u_dir for s in scale)
    beta = orbit(s * f_dir for s in scale)
    return AffineLineWitness(variant, alpha, beta, e1, -e1,
                             float(np.linalg.norm(alpha[-1] - e1)),
                             float(np.linalg.norm(beta[-1] + e1)))


# ---------------------------------------------------------------------------
# the cusp simplex


def length_formulas(x0, y0, v0):
    """Closed-form Finsler norms of the simplex edges w_1, w_2/eps, w_3, w_4."""
    v0 = np.asarray(v0, float)
    vv = float(v0 @ v0)
    ly = math.log(y0)
    w1 = x0 / (2 * x0 - vv + 2 * ly)
    w2_per_eps = 1.0 / (2 * (y0 - math.exp(vv / 2 - x0)))
    w3 = math.sqrt(2 * (x0 * x0 + x0 * ly)) / (2 * (x0 + ly) - vv)
    w4 = math.sqrt(x0) / math.sqrt(2 * (x0 + ly - 0.5 * vv))
    return w1, w2_per_eps, w3, w4


def orthonormal_completion(v0, n):
    """Orthonormal basis of R^n whose first vector is v0/|v0| (identity if v0=0)."""
    v0 = np.asarray(v0, float)
    if n == 0:
        return np.zeros((0, 0))
    if not np.any(v0):
        return np.eye(n)
    mat = np.column_stack([v0, np.eye(n)])
    q, _ = np.linalg.qr(mat)
    q = q[:, :n]
    if q[:, 0] @ v0 < 0:
        q[:, 0] = -q[:, 0]
    return q.T


@dataclass
class CuspSimplex:
    base_point: np.ndarray
    eps: float
    vertices: np.ndarray
    norms: np.ndarray
    formula_norms: np.ndarray
    volume: float


def simplex_edges(x0, y0, v0, eps, d):
    v0 = np.asarray(v0, float).ravel()
    if v0.size != d - 2:
        raise DimensionError(f"v0 must have length {d - 2}")
    basis = orthonormal_completion(v0, d - 2)
    edges = np.zeros((d, d))
    edges[0, 0] = x0
    edges[1, 1] = eps
    for i in range(d - 2):
        edges[2 + i, 2:] = math.sqrt(x0) * basis[i]
    return edges


def formula_norms(x0, y0, v0, eps, d):
    w1, w2e, w3, w4 = length_formulas(x0, y0, v0)
    out = [w1, eps * w2e]
    if d >= 3:
        out.append(w3)
    out.extend([w4] * max(d - 3, 0))
    return np.array(out)


def cusp_simplex(z0, eps=None, cell_width=None):
    """Simplex ``{0, w_1, ..., w_d}`` inside the unit Finsler ball at z0 in B^d.

    Raises NotYetDeep when some edge has norm >= 1.  ``eps`` defaults to
    a tenth of ``cell_width`` (or 0.1 if no cell is given).
    """
    z0 = np.asarray(z0, float)
    d = z0.size
    dom = BentDomain(d)
    if not dom.contains(z0):
        raise DomainError("base point must be interior to B^d")
    if eps is None:
        eps = 0.1 * (1.0 if cell_width is None else float(cell_width))
    x0, y0, v0 = z0[0], z0[1], z0[2:]
    edges = simplex_edges(x0, y0, v0, eps, d)
    norms = finsler_norm(dom, np.broadcast_to(z0, edges.shape), edges)
    fnorms = formula_norms(x0, y0, v0, eps, d)
    if np.any(norms >= 1.0):
        bad = int(np.argmax(norms))
        raise NotYetDeep(f"edge w_{bad + 1} has norm {norms[bad]:.4g} >= 1 at x0={x0}")
    volume = abs(np.linalg.det(edges)) / math.factorial(d)
    vertices = np.vstack([np.zeros(d), edges])
    return CuspSimplex(z0, float(eps), vertices, norms, fnorms, float(volume))


def simplex_threshold(y0, v0, eps=0.1, grid=None):
    """Smallest grid value of x0 beyond which every edge has norm < 1."""
    v0 = np.asarray(v0, float)
    d = v0.size + 2
    grid = np.geomspace(1e-2, 1e6, 801) if grid is None else np.asarray(grid, float)
    ok = np.zeros(grid.size, dtype=bool)
    for i, x0 in enumerate(grid):
        if x0 + math.log(y0) - 0.5 * float(v0 @ v0) <= 0:
            continue
        ok[i] = bool(np.all(formula_norms(x0, y0, v0, eps, d) < 1.0))
    if not ok[-1]:
        raise NotYetDeep("no deep enough x0 on the grid")
    # the last failing index, so every larger grid value passes
    fails = np.nonzero(~ok)[0]
    return float(grid[0] if fails.size == 0 else grid[fails[-1] + 1])


# ---------------------------------------------------------------------------
# cusp volumes


@dataclass
class CuspLattice:
    """A lattice in P_d (``kind='standard'``) or B_d (``kind='bent'``).

    ``basis`` rows are parameter vectors: ``v`` for P_d, ``(b, v)`` for B_d.
    The fundamental cell is the parallelepiped they span, placed at
    ``origin``; for B_d it lives in the coordinates ``(log y, v)``.
    """

    kind: str
    basis: np.ndarray
    origin: np.ndarray = None

    def __post_init__(self):
        self.basis = np.atleast_2d(np.asarray(self.basis, float))
        k = self.basis.shape[0]
        if self.basis.shape != (k, k):
            raise LatticeError("basis must be square")
        if abs(np.linalg.det(self.basis)) < 1e-12:
            raise LatticeError("degenerate fundamental cell")
        if self.origin is None:
            self.origin = np.zeros(k)
        self.origin = np.asarray(self.origin, float)
        if self.kind not in ("standard", "bent"):
            raise ValueError("kind must be 'standard' or 'bent'")

    @property
    def d(self):
        return self.basis.shape[0] + 1

    @property
    def cell_volume(self):
        return abs(float(np.linalg.det(self.basis)))

    @property
    def min_width(self):
        return float(np.min(np.linalg.norm(self.basis, axis=1)))

    def cell_points(self, u):
        return self.origin + np.asarray(u) @ self.basis

    def in_cell(self, w):
        coef = np.linalg.solve(self.basis.T, (np.asarray(w) - self.origin).T).T
        return np.all((coef >= 0) & (coef < 1), axis=-1)

    def cell_corners(self):
        k = self.basis.shape[0]
        grid = np.array(np.meshgrid(*[[0, 1]] * k, indexing="ij")).reshape(k, -1).T
        return self.cell_points(grid)

    def depth_offset(self):
        """Largest ``|v|^2/2 - log y`` (bent) or ``|v|^2/2`` over the cell."""
        # convex in the cell coordinates, so the max is at a corner
        c = self.cell_corners()
        if self.kind == "bent":
            return float(np.max(0.5 * np.sum(c[:, 1:] ** 2, axis=1) - c[:, 0]))
        return float(np.max(0.5 * np.sum(c ** 2, axis=1)))

    def generators(self):
        if self.kind == "bent":
            return [bent_group_element(b[0], b[1:]) for b in self.basis]
        return [ProjectiveMap(parabolic_matrix(b)) for b in self.basis]


@functools.lru_cache(maxsize=None)
def density_table(kind, d, K=4096, seed=0, lo=1e-3, hi=1e5, per_decade=16):
    """Busemann density at the reference points of each horosphere.

    For the bent domain the reference point of level c is ``(c, 1, 0)`` and
    the density elsewhere is ``psi(c) / y``; for the paraboloid it is
    ``(c, 0)`` and the density is constant on the horosphere.
    """
    levels = np.geomspace(lo, hi, int(round(per_decade * math.log10(hi / lo))) + 1)
    dom = BentDomain(d) if kind == "bent" else Paraboloid(d)
    alpha = unit_ball_volume(d)
    vals, errs = [], []
    for c in levels:
        pt = np.zeros(d)
        pt[0] = c
        if kind == "bent":
            pt[1] = 1.0
        ball = busemann_unit_ball_volume(dom, pt, K=K, seed=seed)
        vals.append(alpha / ball.value)
        errs.append(ball.error / ball.value)
    return levels, np.array(vals), np.array(errs)


def tabulated_density(kind, d, c, **table_kw):
    levels, vals, _ = density_table(kind, d, **table_kw)
    c = np.asarray(c, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(np.interp(np.log(c), np.log(levels), np.log(vals)))
    return np.where(c > 0, out, 0.0)


def standard_density_exact(h, d):
    """Riemannian (= Busemann) density of H^d on the horosphere of height h."""
    h = np.asarray(h, float)
    return (2.0 * h) ** (-(d + 1) / 2.0)


def standard_shell_exact(lattice, X, order=24):
    """Hyperbolic volume of ``{v in cell, X <= x <= 2X}`` in the paraboloid model.

    The integral in x is done in closed form; the cell integral uses
    tensor Gauss-Legendre quadrature.
    """
    d = lattice.d
    p = (d + 1) / 2.0
    k = lattice.basis.shape[0]
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    grids = np.meshgrid(*[nodes] * k, indexing="ij")
    u = np.column_stack([g.ravel() for g in grids])
    w = np.prod(np.meshgrid(*[weights] * k, indexing="ij"), axis=0).ravel()
    v = lattice.cell_points(u)
    q = 0.5 * np.sum(v * v, axis=1)

    def antideriv(h):
        return (2.0 * h) ** (1.0 - p) / (2.0 * (1.0 - p))

    inner = antideriv(2 * X - q) - antideriv(X - q)
    return lattice.cell_volume * float(w @ inner)


@dataclass
class ShellSeries:
    kind: str
    d: int
    X: np.ndarray
    estimates: list = field(default_factory=list)
    flag: str = ""

    @property
    def values(self):
        return np.array([e.value for e in self.estimates])

    @property
    def stderrs(self):
        return np.array([e.stderr for e in self.estimates])

    def ratios(self):
        v = self.values
        return v[1:] / v[:-1]

    def ratio_errors(self):
        v, s = self.values, self.stderrs
        r = v[1:] / v[:-1]
        return r * np.sqrt((s[1:] / v[1:]) ** 2 + (s[:-1] / v[:-1]) ** 2)

    def partial_sums(self):
        return np.cumsum(self.values)

    def diverging(self, run=10, sigmas=5.0):
        """True when ``run`` successive shells each add more than ``sigmas`` errors."""
        big = self.values > sigmas * self.stderrs
        count = 0
        for b in big:
            count = count + 1 if b else 0
            if count >= run:
                return True
        return False

    def decaying(self, bound=0.9, sigmas=3.0):
        return bool(np.all(self.ratios() + sigmas * self.ratio_errors() < bound))


def _shell_sample(lattice, X, n, rng):
    k = lattice.basis.shape[0]
    u = rng.random((n, k))
    w = lattice.cell_points(u)
    x = X * (1.0 + rng.random(n))
    return w, x


def cusp_volume_estimate(kind, d, lattice=None, X0=None, shells=9, samples=10**6,
                         seed=0, shards=8, mode="table", K=4096):
    """Busemann volumes of the shells ``{cell} x {X <= x <= 2X}``, ``X = 2^k X0``.

    ``mode='table'`` uses the horosphere invariance of the density, so each
    sample costs one table lookup; ``mode='direct'`` ray-casts the density
    at every sample (slow, used to cross-check the table on small runs).
    """
    if lattice is None:
        lattice = CuspLattice(kind, np.eye(d - 1))
    if lattice.kind != kind or lattice.d != d:
        raise LatticeError("lattice does not match the requested cusp")
    if X0 is None:
        X0 = max(1.0, 2.0 * lattice.depth_offset() + 1.0)
    Xs = X0 * 2.0 ** np.arange(shells)
    series = ShellSeries(kind, d, Xs)
    streams = np.random.SeedSequence(seed).spawn(shells)
    for X, ss in zip(Xs, streams):
        if mode == "table":
            series.estimates.append(_shell_table(kind, d, lattice, X, samples, ss, shards, K))
        else:
            series.estimates.append(_shell_direct(kind, d, lattice, X, samples, ss, K))
    if kind == "bent" and series.diverging():
        series.flag = "growth"
    elif len(series.estimates) > 1 and series.decaying():
        series.flag = "decay"
    return series


def _shell_table(kind, d, lattice, X, samples, ss, shards, K):
    seed = int(ss.generate_state(1)[0])
    streams = ss.spawn(shards)
    per = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    vals = []
    for st, n in zip(streams, per):
        rng = np.random.default_rng(st)
        w, x = _shell_sample(lattice, X, n, rng)
        if kind == "bent":
            c = x - 0.5 * np.sum(w[:, 1:] ** 2, axis=1) + w[:, 0]
        else:
            c = x - 0.5 * np.sum(w ** 2, axis=1)
        vals.append(tabulated_density(kind, d, c, K=K))
    vals = np.concatenate(vals)
    scale = lattice.cell_volume * X
    return VolumeEstimate(float(scale * vals.mean()),
                          float(scale * vals.std(ddof=1) / np.sqrt(vals.size)),
                          int(samples), seed)


def _shell_direct(kind, d, lattice, X, samples, ss, K):
    """Ray-cast density on the actual shell in (x, y, v) or (x, v) coordinates."""
    seed = int(ss.generate_state(1)[0])
    corners = lattice.cell_corners()
    lo_w, hi_w = corners.min(axis=0), corners.max(axis=0)
    if kind == "bent":
        dom = BentDomain(d)
        lo = np.concatenate([[X], np.exp(lo_w[:1]), lo_w[1:]])
        hi = np.concatenate([[2 * X], np.exp(hi_w[:1]), hi_w[1:]])

        def ind(z):
            w = np.column_stack([np.log(z[:, 1]), z[:, 2:]])
            return lattice.in_cell(w)
    else:
        dom = Paraboloid(d)
        lo = np.concatenate([[X], lo_w])
        hi = np.concatenate([[2 * X], hi_w])

        def ind(z):
            return lattice.in_cell(z[:, 1:])
    region = Region(lo, hi, ind)
    return busemann_volume(dom, region, samples=samples, seed=seed, K=K)

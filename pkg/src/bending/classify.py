"""Classification of bent peripheral holonomy.

A cusp is described by a lattice Delta of translations in P^0_{d-1} and an
element gamma whose holonomy centralizes Delta.  After bending, gamma acts
on the pencil of hyperplanes ``x_2 = s`` by an affine map
``s -> beta s + delta``.  When ``beta = 1`` the holonomy can be conjugated
into P_d (standard cusp) or into the non-convex group P'_d.  When
``beta != 1`` it can be conjugated into B_d (bent cusp) or into B'_d.
The conjugators come from explicit two- and three-parameter families,
so every coefficient is solved for in closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cusps import (b_prime_matrix, bent_group_matrix, degenerate_affine_line_witness,
                    p_prime_matrix)
from .domains import BentDomain, Paraboloid, graph_height
from .errors import (InputError, ModelError, NormalFormFailure, NotInCentralizer,
                     OrderError, OrientationError, SandwichFailure)
from .hilbert import hilbert_distance
from .hyperbolic import (bending_matrix, matches_p0_centralizer_shape, parabolic_matrix)

#: relative tolerance deciding ``beta == 1``
BETA_TOL = 1e-7


def _normalized(mat):
    mat = np.asarray(mat, float)
    return mat / mat[-1, -1]


# ---------------------------------------------------------------------------
# peripheral data and the bent holonomy


@dataclass
class PeripheralData:
    """Peripheral subgroup data of one cusp.

    ``delta`` holds translation vectors of P^0_{d-1} (length d-1, first
    entry zero), ``gamma`` the unbent holonomy of gamma, and ``crossings``
    the signed positions ``(p_i, eps_i)`` where a closed curve representing
    gamma meets the bending hypersurface, as fractions of one period.
    """

    dimension: int
    delta: list
    gamma: np.ndarray
    crossings: list = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        d = int(self.dimension)
        self.dimension = d
        self.gamma = np.asarray(self.gamma, float)
        if self.gamma.shape != (d + 1, d + 1):
            raise InputError(f"gamma must be {(d + 1, d + 1)}, got {self.gamma.shape}")
        self.delta = [np.asarray(u, float) for u in self.delta]
        for u in self.delta:
            if u.shape != (d - 1,):
                raise InputError(f"translation vectors must have length {d - 1}")
            if abs(u[0]) > 1e-12:
                raise InputError("Delta translations must lie in P^0 (first entry zero)")
        self.crossings = [(float(p), int(e)) for p, e in self.crossings]
        for p, e in self.crossings:
            if e not in (1, -1):
                raise InputError("crossing signs must be +1 or -1")
        ps = [p for p, _ in self.crossings]
        if any(not 0.0 <= p < 1.0 for p in ps):
            raise OrderError("crossing positions must lie in [0, 1)")
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise OrderError("crossing positions must be strictly increasing")

    @classmethod
    def from_dict(cls, doc):
        try:
            d = int(doc["dimension"])
            if "gamma" in doc:
                gamma = np.array(doc["gamma"], float)
            else:
                gamma = parabolic_matrix(doc["gamma_translation"])
            return cls(d, doc.get("delta", []), gamma,
                       [tuple(c) for c in doc.get("crossings", [])], doc.get("name", ""))
        except KeyError as exc:
            raise InputError(f"missing field {exc.args[0]!r}") from exc

    def to_dict(self):
        return {"name": self.name, "dimension": self.dimension,
                "delta": [u.tolist() for u in self.delta],
                "gamma": self.gamma.tolist(),
                "crossings": [[p, e] for p, e in self.crossings]}

    def delta_matrices(self):
        return [parabolic_matrix(u) for u in self.delta]

    @property
    def period(self):
        """Translation of the pencil by the unbent gamma."""
        g = _normalized(self.gamma)
        return float(g[1, -1])

    def holonomy(self, t):
        """``rho_t(gamma) = F_1 ... F_k rho_0(gamma)`` with F_i a conjugate of c_{eps_i t}.

        F_i bends along the wall ``x_2 = p_i * period``, i.e. it is
        ``c_{eps_i t}`` conjugated by the translation moving ``x_2 = 0``
        onto that wall.
        """
        d = self.dimension
        out = np.eye(d + 1)
        period = self.period
        for p, e in self.crossings:
            shift = np.zeros(d - 1)
            shift[0] = p * period
            T = parabolic_matrix(shift)
            T_inv = parabolic_matrix(-shift)
            out = out @ T @ bending_matrix(e * t, d) @ T_inv
        return _normalized(out @ self.gamma)


def pencil_action(g, delta=None, tol=1e-9):
    """The 2x2 matrix ``[[beta, delta], [0, 1]]`` of g on the pencil ``x_2 = s``."""
    g = g.matrix if hasattr(g, "matrix") else np.asarray(g, float)
    d = g.shape[0] - 1
    if abs(g[-1, -1]) <= tol * np.abs(g).max():
        raise NotInCentralizer("the (d+1, d+1) entry vanishes")
    g = _normalized(g)
    if not matches_p0_centralizer_shape(g, tol=1e-8):
        raise NotInCentralizer("matrix is not of the P^0 centralizer shape")
    if delta is not None:
        for m in delta:
            comm = np.abs(g @ m - m @ g).max() / max(np.abs(g).max(), 1.0)
            if comm > 1e-8:
                raise NotInCentralizer(f"commutator with Delta is {comm:.3g}")
    beta = g[1, 1] / g[0, 0]
    if beta <= 0:
        raise OrientationError(f"pencil action reverses orientation (beta = {beta:.6g})")
    return np.array([[beta, g[1, d] / g[0, 0]], [0.0, 1.0]])


# ---------------------------------------------------------------------------
# the affine structure on the circle


@dataclass
class AffineCircleMap:
    """Piecewise affine developing map of the circle ``R / Z``.

    On ``[0, 1)`` it is ``F_1 ... F_j(s)`` where ``p_j <= s`` and
    ``F_i(s) = p_i + exp(eps_i t) (s - p_i)``.
    """

    points: list
    t: float

    def _compose(self, s, upto):
        for p, e in reversed(self.points[:upto]):
            s = p + math.exp(e * self.t) * (s - p)
        return s

    def on_period(self, s):
        j = sum(1 for p, _ in self.points if p <= s)
        return self._compose(s, j)

    @property
    def scale(self):
        a = sum(1 for _, e in self.points if e > 0)
        b = len(self.points) - a
        return math.exp((a - b) * self.t)

    @property
    def offset(self):
        return self._compose(1.0, len(self.points))

    def holonomy(self, u):
        return self.scale * u + self.offset

    def __call__(self, s):
        """Equivariant extension to R: ``D(s + n) = h^n(D(s))``."""
        s = float(s)
        n = math.floor(s)
        val = self.on_period(s - n)
        if n >= 0:
            for _ in range(n):
                val = self.holonomy(val)
        else:
            for _ in range(-n):
                val = (val - self.offset) / self.scale
        return val

    def breakpoints(self):
        return [p for p, _ in self.points]

    @property
    def standard(self):
        return abs(self.scale - 1.0) <= BETA_TOL


def affine_circle_developing(points, t):
    pts = [(float(p), int(e)) for p, e in points]
    ps = [p for p, _ in pts]
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise OrderError("points must be strictly increasing")
    if any(not 0.0 <= p < 1.0 for p in ps):
        raise OrderError("points must lie in [0, 1)")
    return AffineCircleMap(pts, float(t))


# ---------------------------------------------------------------------------
# classification


KINDS = ("standard", "bent", "degenerate-P'", "degenerate-B'")


@dataclass
class CuspReport:
    name: str
    t: float
    kind: str
    beta: float
    delta: float
    b: float
    pencil_action: list
    conjugator: list
    normal_form: list
    affine_scale: float | None
    affine_offset: float | None
    inverted: bool
    tolerance: float
    witness: dict | None = None

    @property
    def degenerate(self):
        return self.kind.startswith("degenerate")

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc):
        return cls(**doc)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _rows(m):
    return [[float(x) for x in row] for row in np.asarray(m)]


def _central_family(e, f, d):
    E = np.eye(d + 1)
    E[1, 1] = e
    E[1, d] = f
    return E


def _normalizer_family(e, h, g, d):
    """``D F G`` with G a pencil translation, F a shear and D a scaling."""
    G = np.eye(d + 1)
    G[1, d] = g
    F = np.eye(d + 1)
    F[0, 1] = h
    D = np.diag(np.concatenate([[e * e, 1.0], np.full(d - 2, e), [1.0]]))
    return D @ F @ G


def normal_form(M, tol=BETA_TOL):
    """Conjugate a P^0-centralizing matrix into P_d, P'_d, B_d or B'_d.

    Returns ``(kind, conjugator C, normal form C M C^-1, inverted)``; in
    the hyperbolic case M is first replaced by its inverse when ``beta < 1``.
    """
    M = _normalized(M)
    d = M.shape[0] - 1
    beta = M[1, 1] / M[0, 0]
    if beta <= 0:
        raise OrientationError("beta must be positive")
    inverted = False
    if abs(beta - 1.0) <= tol:
        alpha, dlt = M[0, 1], M[1, d]
        v = M[0, 2:d]
        z = M[0, d]
        scale = max(1.0, np.abs(M).max())
        if abs(alpha) <= tol * scale and abs(dlt) <= tol * scale:
            if abs(z - 0.5 * v @ v) <= 1e-7 * scale:
                return "standard", np.eye(d + 1), M, inverted
            raise NormalFormFailure("alpha = delta = 0 but z != |v|^2/2")
        if abs(alpha) <= tol * scale or abs(dlt) <= tol * scale:
            raise NormalFormFailure("exactly one of alpha, delta vanishes")
        e = math.sqrt(abs(alpha / dlt))
        a_new = alpha / e
        sign = 1.0 if alpha * dlt > 0 else -1.0
        target = 0.5 * (v @ v + sign * a_new * a_new)
        f = (z - target) / a_new
        C = _central_family(e, f, d)
        N = C @ M @ np.linalg.inv(C)
        kind = "standard" if sign > 0 else "degenerate-P'"
        return kind, C, N, inverted
    if beta < 1.0:
        M = _normalized(np.linalg.inv(M))
        beta = 1.0 / beta
        inverted = True
    b = math.log(beta)
    alpha, dlt = M[0, 1], M[1, d]
    g = -dlt / (1.0 - beta)
    h = alpha / (1.0 - beta)
    C1 = _normalizer_family(1.0, h, g, d)
    M1 = C1 @ M @ np.linalg.inv(C1)
    v = M1[0, 2:d]
    gap = M1[0, d] - 0.5 * v @ v
    if abs(gap) <= 1e-12 * max(1.0, abs(M1[0, d])):
        raise NormalFormFailure("z = |v|^2/2 leaves no B_d or B'_d normal form")
    e = math.sqrt(b / abs(gap))
    C = _normalizer_family(e, h, g, d)
    N = C @ M @ np.linalg.inv(C)
    kind = "bent" if gap < 0 else "degenerate-B'"
    return kind, C, N, inverted


def _model_matrix(kind, N):
    d = N.shape[0] - 1
    if kind == "standard":
        return parabolic_matrix(np.concatenate([[N[0, 1]], N[0, 2:d]]))
    if kind == "degenerate-P'":
        return p_prime_matrix(N[0, 1], N[0, 2:d])
    b = math.log(N[1, 1])
    if kind == "bent":
        return bent_group_matrix(b, N[0, 2:d])
    return b_prime_matrix(b, N[0, 2:d])


def _witness_basis(kind, N, C, data):
    d = data.dimension
    first = N[0, 1] if kind == "degenerate-P'" else math.log(N[1, 1])
    rows = [np.concatenate([[first], N[0, 2:d]])]
    C_inv = np.linalg.inv(C)
    for m in data.delta_matrices():
        m2 = C @ m @ C_inv
        rows.append(np.concatenate([[0.0], m2[0, 2:d]]))
    return np.array(rows)


def classify(data, t, tol=BETA_TOL, witness=True):
    """Kind and normal form of the bent holonomy of one cusp."""
    M = data.holonomy(t)
    P = pencil_action(M, data.delta_matrices())
    beta, dlt = float(P[0, 0]), float(P[0, 1])
    kind, C, N, inverted = normal_form(M, tol)
    model = _model_matrix(kind, N)
    resid = np.abs(N - model).max() / max(1.0, np.abs(N).max())
    if resid > 1e-7:
        raise NormalFormFailure(f"normal form residual {resid:.3g}")
    if data.crossings:
        circle = affine_circle_developing(data.crossings, (data.dimension + 1) * t)
        scale, offset = circle.scale, circle.offset * data.period
    else:
        scale, offset = 1.0, data.period
    report = CuspReport(name=data.name, t=float(t), kind=kind, beta=beta, delta=dlt,
                        b=math.log(beta), pencil_action=_rows(P), conjugator=_rows(C),
                        normal_form=_rows(N), affine_scale=float(scale),
                        affine_offset=float(offset), inverted=inverted, tolerance=tol)
    if witness and report.degenerate:
        basis = _witness_basis(kind, N, C, data)
        wit = degenerate_affine_line_witness("P'" if kind == "degenerate-P'" else "B'", basis)
        report.witness = {"variant": wit.variant, "basis": _rows(basis),
                          "alpha_residual": wit.alpha_residual,
                          "beta_residual": wit.beta_residual,
                          "alpha_limit": wit.alpha_limit.tolist(),
                          "beta_limit": wit.beta_limit.tolist()}
    return report


# ---------------------------------------------------------------------------
# horoball sandwich


@dataclass
class SandwichReport:
    D: float
    E: float
    margin: float
    max_gap: float
    min_gap: float
    periodicity_residual: float
    grid: int


def _model_height(kind, w):
    if kind == "standard":
        return 0.5 * np.sum(w * w, axis=-1)
    y, v = w[..., 0], w[..., 1:]
    return 0.5 * np.sum(v * v, axis=-1) - np.log(y)


def horoball_sandwich(omega, kind, lattice, grid=64, periodic_tol=1e-6):
    """Constants D, E with ``model - E < h < model + D`` over the cell.

    ``omega`` provides the boundary height (a ``height`` method, a
    callable, or any domain with recession direction e_1).  The cell is the
    lattice's fundamental parallelepiped; for bent cusps it lives in
    ``(log y, v)``.  A Lipschitz margin from grid differences covers the
    points between grid nodes.
    """
    k = lattice.basis.shape[0]
    axes = [np.linspace(0.0, 1.0, grid + 1)] * k
    U = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    W = lattice.cell_points(U.reshape(-1, k)).reshape(U.shape)
    if kind == "bent":
        W = np.concatenate([np.exp(W[..., :1]), W[..., 1:]], axis=-1)
    if callable(omega) and not hasattr(omega, "height") and not hasattr(omega, "chord"):
        h = np.asarray(omega(W.reshape(-1, k)), float).reshape(U.shape[:-1])
    else:
        h = np.asarray(graph_height(omega, W.reshape(-1, k)), float).reshape(U.shape[:-1])
    gap = h - _model_height(kind, W)
    if not np.all(np.isfinite(gap)):
        raise SandwichFailure("boundary height is not finite over the cell")
    periodic = 0.0
    for ax in range(k):
        first = np.take(gap, 0, axis=ax)
        last = np.take(gap, -1, axis=ax)
        periodic = max(periodic, float(np.abs(first - last).max()))
    if periodic > periodic_tol * max(1.0, float(np.abs(gap).max())):
        raise SandwichFailure(f"height minus model is not lattice periodic (residual {periodic:.3g})")
    margin = 0.5 * sum(float(np.abs(np.diff(gap, axis=ax)).max()) for ax in range(k))
    return SandwichReport(float(gap.max() + margin), float(-gap.min() + margin), margin,
                          float(gap.max()), float(gap.min()), periodic, grid)


# ---------------------------------------------------------------------------
# precise invariance


def _horosphere_points(kind, d, c, n, rng):
    if kind == "standard":
        w = rng.normal(size=(n, d - 1))
        x = 0.5 * np.sum(w * w, axis=1) + c
        return np.column_stack([x, w])
    y = np.exp(rng.normal(size=n))
    v = rng.normal(size=(n, d - 2))
    x = 0.5 * np.sum(v * v, axis=1) - np.log(y) + c
    return np.column_stack([x, y, v])


def _translate(kind, u, pts):
    u = np.asarray(u, float)
    out = pts.copy()
    if kind == "standard":
        out[:, 0] = pts[:, 0] + pts[:, 1:] @ u + 0.5 * u @ u
        out[:, 1:] = pts[:, 1:] + u
    else:
        out[:, 0] = pts[:, 0] + pts[:, 2:] @ u + 0.5 * u @ u
        out[:, 2:] = pts[:, 2:] + u
    return out


def displacement(kind, d, u, c, samples=100, seed=0):
    """Hilbert displacement of the translation u on the horosphere of level c.

    Measured in the level-zero domain (paraboloid or B^d).  Returns the
    mean and the spread over sampled horosphere points.
    """
    dom = Paraboloid(d) if kind == "standard" else BentDomain(d)
    pts = _horosphere_points(kind, d, c, samples, np.random.default_rng(seed))
    dist = hilbert_distance(dom, pts, _translate(kind, u, pts))
    return float(np.mean(dist)), float(np.ptp(dist))


def precise_invariance_level(kind, d, u, eps_kmz=0.1, spread_tol=1e-6, seed=0):
    """Smallest horosphere level where the translation moves points less than eps."""
    def disp(c):
        return displacement(kind, d, u, c, samples=8, seed=seed)[0]

    lo, hi = 1e-9, 1.0
    if disp(lo) < eps_kmz:
        hi = lo
    else:
        while disp(hi) >= eps_kmz:
            lo, hi = hi, 2.0 * hi
            if hi > 1e12:
                raise ModelError("displacement does not drop below eps")
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if disp(mid) < eps_kmz:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-12 * hi:
                break
    _, spread = displacement(kind, d, u, hi, samples=100, seed=seed)
    if spread > spread_tol:
        raise ModelError(f"displacement varies along the horosphere (spread {spread:.3g})")
    return hi

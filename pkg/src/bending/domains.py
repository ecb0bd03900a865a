"""Convex domains presented as oracles in the standard affine patch.

A domain answers two questions about points of the patch ``x_{d+1} = 1``:
is a point inside, and where does the line ``x + s v`` leave the domain.
The second answer is returned as the pair of chord parameters
``s_minus < 0 < s_plus``, either of which may be infinite when the line
reaches the hyperplane at infinity without leaving the closure.

Everything is vectorized over leading axes: ``x`` and ``v`` may have shape
``(..., d)``.  The chord parameters are what the Hilbert metric needs, and
they are independent of the Euclidean structure of the patch.
"""

from __future__ import annotations

import numpy as np

from . import projective
from .errors import DimensionError, DomainError, ZeroVector
from .hyperbolic import Membership
from .projective import ProjectiveMap, ProjectivePoint

#: relative precision asked of the chord root finders
ROOT_TOL = 1e-12


def as_affine(x, d=None):
    """Affine coordinates of a point given either as an array or a ProjectivePoint."""
    if isinstance(x, ProjectivePoint):
        last = x.coords[-1]
        if abs(last) <= projective.TOLERANCE:
            raise DomainError("point lies on the hyperplane at infinity of the patch")
        x = x.coords[:-1] / last
    x = np.asarray(x, dtype=float)
    if d is not None and x.shape[-1] != d:
        raise DimensionError(f"expected points of dimension {d}, got {x.shape[-1]}")
    return x


def _safe_div(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    return out


class ConvexDomain:
    """Base class: subclasses implement :meth:`margin` and :meth:`chord`.

    ``margin(x)`` is positive inside, zero on the boundary and negative
    outside (it need not be a distance).  ``chord(x, v)`` returns the chord
    parameters for interior ``x``.
    """

    d: int

    # ---- to be provided by subclasses --------------------------------
    def margin(self, x):
        raise NotImplementedError

    def chord(self, x, v):
        raise NotImplementedError

    def recession(self, direction):
        """Is ``[direction : 0]`` in the closure (as a point of RP^d)?"""
        return False

    def margin_scale(self, x):
        """Magnitude used to turn the margin into a relative tolerance."""
        return 1.0 + np.abs(np.asarray(x)).sum(axis=-1)

    # ---- shared behaviour --------------------------------------------
    def contains(self, x):
        """Vectorized strict interior test in affine coordinates."""
        x = as_affine(x, self.d)
        with np.errstate(invalid="ignore", divide="ignore"):
            m = self.margin(x)
        return np.nan_to_num(m, nan=-1.0) > 0

    def membership(self, x, tol=None):
        tol = projective.TOLERANCE if tol is None else tol
        if isinstance(x, ProjectivePoint) and abs(x.coords[-1]) <= tol:
            return Membership.BOUNDARY if self.recession(x.coords[:-1]) else Membership.EXTERIOR
        x = as_affine(x, self.d)
        with np.errstate(invalid="ignore", divide="ignore"):
            m = float(self.margin(x))
        if np.isnan(m) or m == -np.inf:
            return Membership.EXTERIOR
        if abs(m) <= tol * float(self.margin_scale(x)):
            return Membership.BOUNDARY
        return Membership.INTERIOR if m > 0 else Membership.EXTERIOR

    def check_interior(self, x):
        x = as_affine(x, self.d)
        if not np.all(self.contains(x)):
            raise DomainError(f"point not interior to {type(self).__name__}")
        return x

    def boundary_hit(self, x, v):
        """The two boundary points ``(p_minus, p_plus)`` of the chord through x.

        Endpoints at infinity are returned as points ``[v : 0]``.
        """
        x = self.check_interior(x)
        v = np.asarray(v, dtype=float)
        if not np.any(v):
            raise ZeroVector("direction must be nonzero")
        sm, sp = self.chord(x, v)
        out = []
        for s in (float(sm), float(sp)):
            if np.isfinite(s):
                out.append(ProjectivePoint.from_affine(x + s * v))
            else:
                out.append(ProjectivePoint(np.append(v, 0.0)))
        return tuple(out)


# ---------------------------------------------------------------------------
# quadrics and polytopes


class Ellipsoid(ConvexDomain):
    """``{z : (z - c)^T A (z - c) < 1}`` with A symmetric positive definite."""

    def __init__(self, center, A):
        self.center = np.asarray(center, dtype=float).ravel()
        self.A = np.asarray(A, dtype=float)
        self.d = self.center.size
        if self.A.shape != (self.d, self.d):
            raise DimensionError("shape matrix does not match the center")
        if np.any(np.linalg.eigvalsh(self.A) <= 0):
            raise ValueError("shape matrix must be positive definite")

    @classmethod
    def ball(cls, d, radius=1.0, center=None):
        center = np.zeros(d) if center is None else center
        return cls(center, np.eye(d) / radius**2)

    def margin(self, x):
        z = x - self.center
        return 1.0 - np.einsum("...i,ij,...j->...", z, self.A, z)

    def chord(self, x, v):
        z = x - self.center
        Av = v @ self.A
        a = np.einsum("...i,...i->...", v, Av)
        b = np.einsum("...i,...i->...", z, Av)
        r = 1.0 - np.einsum("...i,ij,...j->...", z, self.A, z)
        disc = np.sqrt(b * b + a * r)
        # cancellation-free forms of the two quadratic roots
        s_plus = np.where(b >= 0, _safe_div(r, b + disc), _safe_div(disc - b, a))
        s_minus = np.where(b <= 0, -_safe_div(r, disc - b), -_safe_div(b + disc, a))
        return s_minus, s_plus


def Interval(lo, hi):
    """The segment ``(lo, hi)`` as a one-dimensional ellipsoid."""
    half = 0.5 * (hi - lo)
    return Ellipsoid([0.5 * (lo + hi)], [[1.0 / half**2]])


class Paraboloid(ConvexDomain):
    """Epigraph ``x_1 > |v|^2/2 + level``; level 0 is the paraboloid model of H^d.

    Positive levels give the standard horoballs centered at ``[e_1]``.
    """

    def __init__(self, d, level=0.0):
        self.d = int(d)
        self.level = float(level)

    def height(self, w):
        w = np.asarray(w, dtype=float)
        return 0.5 * np.sum(w * w, axis=-1) + self.level

    def margin(self, x):
        return x[..., 0] - self.height(x[..., 1:])

    def margin_scale(self, x):
        return 1.0 + np.abs(x[..., 0]) + 0.5 * np.sum(x[..., 1:] ** 2, axis=-1)

    def recession(self, direction):
        direction = np.asarray(direction, float)
        return np.allclose(direction[1:], 0.0, atol=projective.TOLERANCE)

    def chord(self, x, v):
        A = self.margin(x)
        B = v[..., 0] - np.einsum("...i,...i->...", x[..., 1:], v[..., 1:])
        C = 0.5 * np.einsum("...i,...i->...", v[..., 1:], v[..., 1:])
        disc = np.sqrt(B * B + 4.0 * A * C)
        s_plus = np.where(B >= 0, _safe_div(B + disc, 2.0 * C), _safe_div(2.0 * A, disc - B))
        s_minus = np.where(B >= 0, -_safe_div(2.0 * A, disc + B), _safe_div(B - disc, 2.0 * C))
        s_plus = np.where(np.isnan(s_plus), np.inf, s_plus)
        s_minus = np.where(np.isnan(s_minus), -np.inf, s_minus)
        return s_minus, s_plus


class Polytope(ConvexDomain):
    """``{z : normals @ z < offsets}``."""

    def __init__(self, normals, offsets):
        self.normals = np.atleast_2d(np.asarray(normals, dtype=float))
        self.offsets = np.asarray(offsets, dtype=float).ravel()
        self.d = self.normals.shape[1]

    @classmethod
    def simplex(cls, d, scale=1.0):
        """Standard simplex ``{z_i > 0, sum z_i < scale}``."""
        normals = np.vstack([-np.eye(d), np.ones((1, d))])
        offsets = np.append(np.zeros(d), scale)
        return cls(normals, offsets)

    @classmethod
    def box(cls, lo, hi):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        d = lo.size
        return cls(np.vstack([np.eye(d), -np.eye(d)]), np.concatenate([hi, -lo]))

    def margin(self, x):
        return np.min(self.offsets - x @ self.normals.T, axis=-1)

    def chord(self, x, v):
        slack = self.offsets - x @ self.normals.T
        rate = v @ self.normals.T
        ratio = _safe_div(slack, rate)
        s_plus = np.min(np.where(rate > 0, ratio, np.inf), axis=-1)
        s_minus = np.max(np.where(rate < 0, ratio, -np.inf), axis=-1)
        return s_minus, s_plus


# ---------------------------------------------------------------------------
# the bent domain


def _bisect_log_gap(phi_of_gap, cap, iters=64):
    """Root of ``phi(cap - u)`` in ``u`` where phi -> -inf as ``u -> 0``.

    Bisection runs on ``log u`` so that roots exponentially close to the
    cap are resolved to full relative precision.
    """
    lo = np.full(cap.shape, -745.0)  # phi < 0 side (or below resolution)
    hi = np.log(cap)                 # phi > 0 side (s = 0)
    below = phi_of_gap(np.exp(lo)) > 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pos = phi_of_gap(np.exp(mid)) > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    u = np.exp(0.5 * (lo + hi))
    return np.where(below, 0.0, u)


def _concave_root_right(phi, dphi, lo, hi, iters=100):
    """Root of a concave phi with ``phi(lo) > 0 > phi(hi)``.

    Newton steps taken from the right end never overshoot the root for a
    concave function, so ``hi`` decreases monotonically; a bisection step
    is used whenever the Newton step is not finite.
    """
    f_hi = phi(hi)
    for _ in range(iters):
        slope = dphi(hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = hi - f_hi / slope
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand > hi)
        cand = np.where(bad, 0.5 * (lo + hi), cand)
        f_c = phi(cand)
        pos = f_c > 0
        lo = np.where(pos, cand, lo)
        done = np.abs(hi - cand) <= ROOT_TOL * 1e-3 * np.maximum(np.abs(hi), 1e-300)
        hi = np.where(pos, hi, cand)
        f_hi = np.where(pos, f_hi, f_c)
        if np.all(done | (hi - lo <= 1e-16 * np.abs(hi))):
            break
    return hi


class BentDomain(ConvexDomain):
    """Epigraph of ``g_c(y, v) = |v|^2/2 - log(y) + c`` over ``y > 0``.

    Coordinates are ``(x, y, v)`` with ``v`` of length d-2.  Level 0 is the
    domain B^d; positive levels are the horoballs centered at the boundary
    segment ``s_inf = [e_1, e_2]``.
    """

    def __init__(self, d, level=0.0):
        if d < 2:
            raise DimensionError("the bent domain needs d >= 2")
        self.d = int(d)
        self.level = float(level)

    def height(self, w):
        w = np.asarray(w, dtype=float)
        y, v = w[..., 0], w[..., 1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 0.5 * np.sum(v * v, axis=-1) - np.log(y) + self.level
        return np.where(y > 0, out, np.inf)

    def level_of(self, x):
        """Horosphere level ``x - |v|^2/2 + log y`` of a point (g_c with c=level)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return x[..., 0] - 0.5 * np.sum(x[..., 2:] ** 2, axis=-1) + np.log(x[..., 1])

    def margin(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            m = self.level_of(x) - self.level
        return np.where(x[..., 1] > 0, m, -np.inf)

    def margin_scale(self, x):
        with np.errstate(divide="ignore"):
            return (1.0 + np.abs(x[..., 0]) + 0.5 * np.sum(x[..., 2:] ** 2, axis=-1)
                    + np.abs(np.log(np.abs(x[..., 1]) + 1e-300)))

    def recession(self, direction):
        direction = canonical = np.asarray(direction, float)
        if np.any(np.abs(canonical[2:]) > projective.TOLERANCE):
            return False
        # the closed quarter-circle of directions (a, b, 0) with a, b >= 0,
        # up to the antipodal identification of RP^d
        a, b = direction[0], direction[1]
        tol = projective.TOLERANCE
        return (a >= -tol and b >= -tol) or (a <= tol and b <= tol)

    def _ray_exit(self, x, v):
        """Positive exit parameter of ``x + s v`` (vectorized)."""
        x0, y0, w0 = x[..., 0], x[..., 1], x[..., 2:]
        dx, dy, dw = v[..., 0], v[..., 1], v[..., 2:]
        c = self.level
        q0 = x0 - 0.5 * np.sum(w0 * w0, axis=-1) - c
        q1 = dx - np.sum(w0 * dw, axis=-1)
        q2 = 0.5 * np.sum(dw * dw, axis=-1)

        def poly(s):
            return q0 + s * (q1 - s * q2)

        out = np.full(q0.shape, np.inf)
        infinite = (q2 == 0) & (q1 >= 0) & (dy >= 0)
        capped = dy < 0
        free = ~infinite & ~capped

        if np.any(capped):
            idx = np.nonzero(capped)
            cap = y0[idx] / -dy[idx]
            P0, P1, P2 = q0[idx], q1[idx], q2[idx]
            ndy, cp = -dy[idx], cap

            def phi_gap(u):
                s = cp - u
                with np.errstate(divide="ignore"):
                    return P0 + s * (P1 - s * P2) + np.log(ndy * u)

            out[idx] = cap - _bisect_log_gap(phi_gap, cap)

        if np.any(free):
            idx = np.nonzero(free)
            P0, P1, P2 = q0[idx], q1[idx], q2[idx]
            Y, DY = y0[idx], dy[idx]

            def phi(s):
                return P0 + s * (P1 - s * P2) + np.log(Y + s * DY)

            def dphi(s):
                return P1 - 2.0 * s * P2 + DY / (Y + s * DY)

            hi = np.ones_like(P0)
            for _ in range(2100):
                neg = phi(hi) < 0
                if np.all(neg):
                    break
                hi = np.where(neg, hi, 2.0 * hi)
            lo = np.zeros_like(P0)
            out[idx] = _concave_root_right(phi, dphi, lo, hi)
        return out

    def chord(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        x, v = np.broadcast_arrays(x, v)
        shape = x.shape[:-1]
        xf, vf = x.reshape(-1, self.d), v.reshape(-1, self.d)
        s_plus = self._ray_exit(xf, vf)
        s_minus = -self._ray_exit(xf, -vf)
        return s_minus.reshape(shape), s_plus.reshape(shape)


# ---------------------------------------------------------------------------
# projective images and generic epigraphs


class TransformedDomain(ConvexDomain):
    """The image ``g(base)`` of a domain under a projective map.

    Chords are computed by pulling the line back through ``g``; this needs
    the closure of ``g(base)`` to stay inside the patch, which is checked
    only along the chords that are actually requested.
    """

    def __init__(self, base, g):
        self.base = base
        self.d = base.d
        mat = g.matrix if isinstance(g, ProjectiveMap) else np.asarray(g, float)
        self.g = mat
        self.g_inv = np.linalg.inv(mat)

    def _pull(self, x):
        X = np.concatenate([x, np.ones(x.shape[:-1] + (1,))], axis=-1) @ self.g_inv.T
        return X

    def margin(self, x):
        X = self._pull(np.asarray(x, float))
        alpha = X[..., -1]
        with np.errstate(divide="ignore", invalid="ignore"):
            m = self.base.margin(X[..., :-1] / alpha[..., None])
        return np.where(alpha != 0, m, -np.inf)

    def recession(self, direction):
        D = self.g_inv @ np.append(direction, 0.0)
        if abs(D[-1]) <= projective.TOLERANCE * np.linalg.norm(D):
            return self.base.recession(D[:-1])
        return self.base.membership(D[:-1] / D[-1]) == Membership.BOUNDARY

    def chord(self, x, v):
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        X = self._pull(x)
        V = np.concatenate([v, np.zeros(v.shape[:-1] + (1,))], axis=-1) @ self.g_inv.T
        sign = np.sign(X[..., -1])[..., None]
        X, V = X * sign, V * sign
        alpha, omega = X[..., -1], V[..., -1]
        base_x = X[..., :-1] / alpha[..., None]
        u = (alpha[..., None] * V[..., :-1] - omega[..., None] * X[..., :-1]) / alpha[..., None] ** 2
        sig_m, sig_p = self.base.chord(base_x, u)
        # s = sigma alpha / (alpha - sigma omega), written through 1/sigma
        with np.errstate(divide="ignore", invalid="ignore"):
            s_p = alpha / (alpha / sig_p - omega)
            s_m = alpha / (alpha / sig_m - omega)
        s_p = np.where(np.isfinite(s_p) & (s_p > 0), s_p, np.inf)
        s_m = np.where(np.isfinite(s_m) & (s_m < 0), s_m, -np.inf)
        return s_m, s_p


class Epigraph:
    """Epigraph of an arbitrary height function (used only for its graph).

    This is not a ConvexDomain: it exists to feed boundary graphs to the
    horoball sandwich when the height is not convex.
    """

    def __init__(self, d, height):
        self.d = int(d)
        self._height = height

    def height(self, w):
        return self._height(np.asarray(w, dtype=float))


def graph_height(domain, w, start=1.0):
    """Height of the boundary above ``w`` for domains with recession direction e_1.

    Uses the domain's own ``height`` when available, otherwise climbs the
    vertical line until it enters the domain and shoots a chord downward.
    """
    if hasattr(domain, "height"):
        return domain.height(w)
    w = np.atleast_2d(np.asarray(w, float))
    x = np.full(w.shape[0], float(start))
    for _ in range(200):
        pts = np.column_stack([x, w])
        inside = domain.contains(pts)
        if np.all(inside):
            break
        x = np.where(inside, x, 2.0 * np.abs(x) + 1.0)
    pts = np.column_stack([x, w])
    e1 = np.zeros(domain.d)
    e1[0] = 1.0
    s_minus, _ = domain.chord(pts, np.broadcast_to(e1, pts.shape))
    return x + s_minus


# ---------------------------------------------------------------------------
# regions for volume integrals


class Region:
    """A subset of a domain given by a membership callable and a bounding box."""

    def __init__(self, lo, hi, indicator=None):
        self.lo = np.asarray(lo, dtype=float).ravel()
        self.hi = np.asarray(hi, dtype=float).ravel()
        self._indicator = indicator

    @property
    def d(self):
        return self.lo.size

    @property
    def box_volume(self):
        return float(np.prod(np.maximum(self.hi - self.lo, 0.0)))

    def indicator(self, x):
        x = np.asarray(x, float)
        inside = np.all((x >= self.lo) & (x <= self.hi), axis=-1)
        if self._indicator is not None:
            inside &= np.asarray(self._indicator(x), dtype=bool)
        return inside

    @classmethod
    def box(cls, lo, hi):
        return cls(lo, hi)

    @classmethod
    def ball(cls, center, radius):
        center = np.asarray(center, float)

        def ind(x):
            return np.sum((x - center) ** 2, axis=-1) < radius**2

        return cls(center - radius, center + radius, ind)

    @classmethod
    def within(cls, domain, lo, hi):
        """The part of ``domain`` inside the box ``[lo, hi]``."""
        return cls(lo, hi, domain.contains)

"""Homogeneous-coordinate linear algebra on RP^d and its sphere lift S^d.

Points, hyperplanes and maps are immutable values wrapping numpy arrays.
Comparisons are made on canonical representatives with a relative
tolerance (see :data:`TOLERANCE`).
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .errors import (CollinearityError, DegenerateCrossRatio, DegenerateLine,
                     DimensionError)

#: relative tolerance used by every projective comparison in the package
TOLERANCE = 1e-9


def set_tolerance(tol):
    global TOLERANCE
    TOLERANCE = float(tol)


@contextmanager
def tolerance(tol):
    """Temporarily override :data:`TOLERANCE`."""
    old = TOLERANCE
    set_tolerance(tol)
    try:
        yield
    finally:
        set_tolerance(old)


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def canonical_vector(vec):
    """Unit Euclidean norm, first nonzero entry positive."""
    vec = np.asarray(vec, dtype=float)
    norm = np.linalg.norm(vec)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("homogeneous coordinates must be finite and nonzero")
    if abs(norm - 1.0) > 4 * np.finfo(float).eps:
        vec = vec / norm  # skipping unit vectors keeps this idempotent
    # "nonzero" relative to the unit-norm vector
    nz = np.flatnonzero(np.abs(vec) > TOLERANCE)
    if vec[nz[0]] < 0:
        vec = -vec
    return vec


def sphere_normalize(vec):
    """Representative of the half-line through ``vec`` (no sign change)."""
    vec = np.asarray(vec, dtype=float)
    return vec / np.linalg.norm(vec, axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of RP^d given by homogeneous coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(canonical_vector(self.coords)))

    @classmethod
    def from_affine(cls, x):
        """Point of the standard patch ``x_{d+1} = 1``."""
        return cls(np.append(np.asarray(x, dtype=float), 1.0))

    @property
    def dimension(self):
        return self.coords.size - 1

    def affine(self):
        """Coordinates in the standard patch; raises if at infinity."""
        last = self.coords[-1]
        if abs(last) <= TOLERANCE:
            raise ValueError("point lies on the hyperplane at infinity")
        return self.coords[:-1] / last

    def isclose(self, other, tol=None):
        tol = TOLERANCE if tol is None else tol
        return (self.coords.shape == other.coords.shape
                and np.allclose(self.coords, other.coords, rtol=0, atol=tol))

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    def __repr__(self):
        inner = ":".join(f"{c:.6g}" for c in self.coords)
        return f"ProjectivePoint([{inner}])"


@dataclass(frozen=True, eq=False)
class ProjectiveHyperplane:
    """A hyperplane of RP^d given by a covector."""

    covector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "covector",
                           _frozen(canonical_vector(self.covector)))

    @property
    def dimension(self):
        return self.covector.size - 1

    def pairing(self, point):
        coords = point.coords if isinstance(point, ProjectivePoint) else point
        return float(self.covector @ np.asarray(coords, dtype=float))

    def incident(self, point, tol=None):
        tol = TOLERANCE if tol is None else tol
        coords = point.coords if isinstance(point, ProjectivePoint) else point
        coords = np.asarray(coords, dtype=float)
        return abs(self.covector @ coords) <= tol * np.linalg.norm(coords)

    def __eq__(self, other):
        if not isinstance(other, ProjectiveHyperplane):
            return NotImplemented
        return np.allclose(self.covector, other.covector, rtol=0, atol=TOLERANCE)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ProjectiveMap:
    """An element of SL^±_{d+1}(R), i.e. a matrix scaled to ``|det| = 1``.

    The sign of the representative is kept: on the sphere S^d the maps
    ``A`` and ``-A`` differ.
    """

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
        det = np.linalg.det(mat)
        if not np.isfinite(det) or abs(det) < 1e-300:
            raise ValueError("matrix is not invertible")
        mat = mat / abs(det) ** (1.0 / mat.shape[0])
        object.__setattr__(self, "matrix", _frozen(mat))

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d + 1))

    @property
    def dimension(self):
        return self.matrix.shape[0] - 1

    def __matmul__(self, other):
        if isinstance(other, ProjectiveMap):
            return ProjectiveMap(self.matrix @ other.matrix)
        if isinstance(other, ProjectivePoint):
            return apply_map(self, other)
        if isinstance(other, ProjectiveHyperplane):
            return ProjectiveHyperplane(other.covector @ np.linalg.inv(self.matrix))
        return NotImplemented

    def inverse(self):
        return ProjectiveMap(np.linalg.inv(self.matrix))

    def isclose(self, other, tol=None, projective=True):
        """Compare as PGL classes (``projective=True``) or as SL^± matrices."""
        tol = TOLERANCE if tol is None else tol
        a, b = self.matrix, other.matrix
        if a.shape != b.shape:
            return False
        scale = max(1.0, np.abs(a).max())
        if np.allclose(a, b, rtol=0, atol=tol * scale):
            return True
        return projective and np.allclose(a, -b, rtol=0, atol=tol * scale)

    def __eq__(self, other):
        if not isinstance(other, ProjectiveMap):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None


def apply_map(g, x):
    """Canonicalized image ``g . x``."""
    mat = g.matrix if isinstance(g, ProjectiveMap) else np.asarray(g, dtype=float)
    return ProjectivePoint(mat @ x.coords)


def _coords(p):
    return p.coords if isinstance(p, ProjectivePoint) else np.asarray(p, dtype=float)


def _line_basis(points):
    """Orthonormal basis (2 x (d+1)) of the plane spanned by ``points``."""
    stack = np.array([canonical_vector(_coords(p)) for p in points])
    _, sing, vt = np.linalg.svd(stack)
    if sing.size > 2 and sing[2] > TOLERANCE * max(sing[0], 1.0) * 10:
        raise CollinearityError("points are not collinear")
    return vt[:2]


def cross_ratio(p, x, y, q):
    """The cross-ratio ``[p:x:y:q] = (|py| |qx|) / (|px| |qy|)``.

    Computed from 2x2 determinants in a basis of the common line, which
    equals the affine formula in any chart of that line.  With the points
    in the order p, x, y, q along the line the value is >= 1.
    """
    basis = _line_basis([p, x, y, q])
    P, X, Y, Q = (basis @ canonical_vector(_coords(pt)) for pt in (p, x, y, q))

    def det(a, b):
        return a[0] * b[1] - a[1] * b[0]

    scale = TOLERANCE
    px, qy = det(P, X), det(Q, Y)
    if abs(px) <= scale or abs(qy) <= scale:
        raise DegenerateCrossRatio("p coincides with x or q coincides with y")
    return abs(det(P, Y) * det(Q, X)) / abs(px * qy)


@dataclass(frozen=True, eq=False)
class ProjectiveLine:
    """The line through two distinct points, ``s -> [cos s x + sin s y]``.

    x and y are the unit canonical representatives; the parametrization
    has period pi, ``line(0) == x`` and ``line(pi/2) == y``.
    """

    start: ProjectivePoint
    end: ProjectivePoint

    def __post_init__(self):
        if self.start.isclose(self.end):
            raise DegenerateLine("a line needs two distinct points")

    @property
    def _frame(self):
        xh = self.start.coords
        yh = self.end.coords
        return xh, yh

    def __call__(self, s):
        xh, yh = self._frame
        return ProjectivePoint(np.cos(s) * xh + np.sin(s) * yh)

    def parameter_of(self, point):
        """Parameter in [0, pi) of a point on the line."""
        xh, yh = self._frame
        basis = np.array([xh, yh])
        coef, *_ = np.linalg.lstsq(basis.T, point.coords, rcond=None)
        return float(np.arctan2(coef[1], coef[0]) % np.pi)

    def contains(self, point, tol=None):
        tol = TOLERANCE if tol is None else tol
        xh, yh = self._frame
        basis = np.array([xh, yh])
        coef, *_ = np.linalg.lstsq(basis.T, point.coords, rcond=None)
        return np.linalg.norm(basis.T @ coef - point.coords) <= tol * 10


def line_through(x, y):
    """Parametrized projective line through ``x`` and ``y``.

    Parameter 0 gives x and pi/2 gives y (representatives are the unit
    canonical vectors, so the pi/4 point of ``e1, e2`` is ``[1:1:0]``).
    """
    return ProjectiveLine(x, y)


class AffinePatch:
    """The affine chart ``RP^d \\ H`` for a hyperplane ``H``.

    ``chart`` sends a point to affine coordinates in R^d, ``unchart`` is its
    inverse.  The standard patch ``x_{d+1} != 0`` uses the first d
    homogeneous coordinates directly.
    """

    def __init__(self, hyperplane_at_infinity):
        self.hyperplane_at_infinity = hyperplane_at_infinity
        phi = np.asarray(hyperplane_at_infinity.covector)
        n = phi.size
        nz = np.flatnonzero(np.abs(phi) > TOLERANCE)
        if nz.size == 1:
            k = nz[0]
            self._base = np.zeros(n)
            self._base[k] = 1.0 / phi[k]
            self._frame = np.delete(np.eye(n), k, axis=1)
        else:
            # orthonormal basis of ker(phi) via QR of the projector
            _, _, vt = np.linalg.svd(phi[None, :])
            self._frame = vt[1:].T
            self._base = phi / (phi @ phi)
        self._phi = phi

    @classmethod
    def standard(cls, d):
        cov = np.zeros(d + 1)
        cov[-1] = 1.0
        return cls(ProjectiveHyperplane(cov))

    @property
    def dimension(self):
        return self._phi.size - 1

    def chart(self, point):
        coords = _coords(point)
        value = self._phi @ coords
        if abs(value) <= TOLERANCE * np.linalg.norm(coords):
            raise ValueError("point lies on the hyperplane at infinity")
        return self._frame.T @ (coords / value)

    def unchart(self, x):
        return ProjectivePoint(self._base + self._frame @ np.asarray(x, dtype=float))

    def lift(self, x):
        """Homogeneous vector (not canonicalized) with ``phi = 1``."""
        return self._base + self._frame @ np.asarray(x, dtype=float)

"""Hilbert distance, Finsler norm and Busemann volume of convex domains.

All quantities are computed from chord parameters.  For interior points x,
y of a domain, put the chord through them as ``x + s (y - x)``; it leaves
the domain at ``s_minus < 0`` and ``s_plus > 1`` and the cross-ratio of the
four points reduces to

    [p : x : y : q] = (1 - 1/s_minus) / (1 - 1/s_plus),

which is finite even when an endpoint is at infinity.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gamma
from scipy.stats import qmc

from .domains import as_affine
from .errors import ContainmentError, DomainError, ZeroVector


def unit_ball_volume(d):
    """Lebesgue volume alpha_d of the Euclidean unit d-ball."""
    return math.pi ** (d / 2) / gamma(d / 2 + 1)


def hilbert_distance(domain, x, y):
    """``d(x, y) = 1/2 log [p : x : y : q]`` (vectorized over leading axes)."""
    x = as_affine(x, domain.d)
    y = as_affine(y, domain.d)
    x, y = np.broadcast_arrays(x, y)
    if not (np.all(domain.contains(x)) and np.all(domain.contains(y))):
        raise DomainError("Hilbert distance needs interior points")
    v = y - x
    same = ~np.any(v != 0, axis=-1)
    v = np.where(same[..., None], 1.0, v)
    s_minus, s_plus = domain.chord(x, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_cr = np.log1p(-1.0 / s_minus) - np.log1p(-1.0 / s_plus)
    out = np.where(same, 0.0, 0.5 * log_cr)
    return out if out.ndim else float(out)


def finsler_norm(domain, x, v):
    """``F(x, v) = (|v|/2)(1/|x p_minus| + 1/|x p_plus|)``.

    In chord parameters along v this is ``(1/|s_minus| + 1/s_plus) / 2``,
    which is positively homogeneous of degree one in v.
    """
    x = as_affine(x, domain.d)
    v = np.asarray(v, dtype=float)
    if np.any(~np.any(v != 0, axis=-1)):
        raise ZeroVector("Finsler norm of the zero vector")
    s_minus, s_plus = domain.chord(*np.broadcast_arrays(x, v))
    out = 0.5 * (1.0 / np.abs(s_minus) + 1.0 / s_plus)
    return out if out.ndim else float(out)


def finsler_finite_difference(domain, x, v, h=1e-6):
    """Central difference ``d(x - h v, x + h v) / (2h)``, an oracle for F."""
    x = as_affine(x, domain.d)
    v = np.asarray(v, dtype=float)
    return hilbert_distance(domain, x - h * v, x + h * v) / (2.0 * h)


# ---------------------------------------------------------------------------
# Busemann volume


def sphere_directions(d, K, seed=0):
    """K unit vectors spread over S^{d-1}.

    d = 1 gives the two signs, d = 2 an equispaced circle with a seeded
    rotation, d >= 3 scrambled Sobol points pushed through the Gaussian
    quantile and normalized.
    """
    if d == 1:
        return np.array([[1.0], [-1.0]])
    rng = np.random.default_rng(seed)
    if d == 2:
        theta = (np.arange(K) + rng.random()) * (2.0 * np.pi / K)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    from scipy.special import ndtri

    m = max(int(math.ceil(math.log2(K))), 1)
    pts = qmc.Sobol(d, scramble=True, seed=rng).random_base2(m)[:K]
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _mean_r_power(domain, x, A, dirs):
    """``E_u[r(u)^d]`` for the body ``A^{-1} B`` where ``r = 1/F(x, A u)``."""
    d = domain.d
    w = dirs @ A.T
    xs = np.broadcast_to(x, w.shape)
    F = finsler_norm(domain, xs, w)
    return np.mean(F ** (-d)), F


def _whitening(domain, x, dirs, rounds=3):
    """Linear map making the unit tangent ball roughly round.

    Deep in a cusp the ball becomes needle-shaped and uniform directions
    sample it poorly; the map comes from the ball's second-moment matrix
    ``int_B z z^T = E_u[r^{d+2} u u^T] * |S^{d-1}|/(d+2)``.
    """
    d = domain.d
    A = np.eye(d)
    for _ in range(rounds):
        w = dirs @ A.T
        F = finsler_norm(domain, np.broadcast_to(x, w.shape), w)
        r = 1.0 / F
        pts = (r[:, None] * w)
        weights = r ** d
        M = (pts * weights[:, None]).T @ pts / weights.sum()
        evals, evecs = np.linalg.eigh(0.5 * (M + M.T))
        evals = np.maximum(evals, 1e-300)
        A = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    return A


@dataclass
class BallVolume:
    value: float
    error: float
    directions: int


def busemann_unit_ball_volume(domain, x, K=4096, seed=0, replicates=4, whiten=True):
    """Lebesgue volume of the unit ball of the Finsler norm at x.

    Radial integration: the ball is ``{r u : r < 1/F(x, u)}`` so its volume
    is ``alpha_d E_u[F(x, u)^{-d}]`` for u uniform on the sphere.  The error
    is the spread over independently scrambled direction sets.
    """
    x = np.asarray(as_affine(x, domain.d), float)
    if not domain.contains(x):
        raise DomainError("unit ball volume needs an interior point")
    d = domain.d
    alpha = unit_ball_volume(d)
    if d == 1:
        s_minus, s_plus = domain.chord(x, np.array([1.0]))
        r_plus = 1.0 / (0.5 * (1.0 / abs(float(s_minus)) + 1.0 / float(s_plus)))
        return BallVolume(2.0 * r_plus, 0.0, 2)
    seeds = np.random.SeedSequence(seed).spawn(replicates)
    per = max(K // replicates, 8)
    A = (_whitening(domain, x, sphere_directions(d, per, seeds[0])) if whiten else np.eye(d))
    det = abs(np.linalg.det(A))
    ests = []
    for ss in seeds:
        m, _ = _mean_r_power(domain, x, A, sphere_directions(d, per, ss))
        ests.append(alpha * det * m)
    ests = np.array(ests)
    err = ests.std(ddof=1) / np.sqrt(len(ests)) if len(ests) > 1 else 0.0
    return BallVolume(float(ests.mean()), float(err), per * replicates)


def busemann_density(domain, x, K=1024, seed=0):
    """Density ``alpha_d / mu_L(B_x(1))`` of the Busemann volume at x."""
    vol = busemann_unit_ball_volume(domain, x, K=K, seed=seed)
    return unit_ball_volume(domain.d) / vol.value


def busemann_density_batch(domain, xs, K=256, seed=0, whiten=True):
    """Busemann density at many points with one shared direction set."""
    xs = np.atleast_2d(np.asarray(xs, float))
    d = domain.d
    if d == 1:
        s_minus, s_plus = domain.chord(xs, np.ones_like(xs))
        F = 0.5 * (1.0 / np.abs(s_minus) + 1.0 / s_plus)
        return F
    dirs = sphere_directions(d, K, seed)
    out = np.empty(xs.shape[0])
    for i, x in enumerate(xs):
        A = _whitening(domain, x, dirs, rounds=2) if whiten else np.eye(d)
        m, _ = _mean_r_power(domain, x, A, dirs)
        out[i] = 1.0 / (abs(np.linalg.det(A)) * m)
    return out


@dataclass
class VolumeEstimate:
    value: float
    stderr: float
    samples: int
    seed: int

    CSV_FIELDS = ("value", "stderr", "samples", "seed")

    def as_row(self):
        return {k: v for k, v in asdict(self).items()}

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerow({"value": repr(self.value), "stderr": repr(self.stderr),
                         "samples": self.samples, "seed": self.seed})
        return buf.getvalue()


def busemann_volume(domain, region, samples=4096, seed=0, K=128, shards=4, density=None):
    """Monte Carlo Busemann volume of a region of the domain.

    Samples are drawn uniformly in the region's bounding box in ``shards``
    independent streams spawned from ``seed``, so the estimate does not
    depend on how shards are scheduled.  ``density`` may be supplied to
    replace the ray-cast density (e.g. by an invariance-based table).
    """
    if region.box_volume == 0.0:
        return VolumeEstimate(0.0, 0.0, 0, seed)
    streams = np.random.SeedSequence(seed).spawn(shards)
    per = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    values = []
    for ss, n in zip(streams, per):
        rng = np.random.default_rng(ss)
        z = region.lo + (region.hi - region.lo) * rng.random((n, region.d))
        inside = region.indicator(z) & domain.contains(z)
        vals = np.zeros(n)
        if np.any(inside):
            if density is None:
                vals[inside] = busemann_density_batch(domain, z[inside], K=K, seed=seed)
            else:
                vals[inside] = density(z[inside])
        values.append(vals)
    vals = np.concatenate(values)
    if not np.any(vals):
        return VolumeEstimate(0.0, 0.0, samples, seed)
    vol = region.box_volume
    value = vol * vals.mean()
    stderr = vol * vals.std(ddof=1) / np.sqrt(vals.size)
    return VolumeEstimate(float(value), float(stderr), int(samples), int(seed))


# ---------------------------------------------------------------------------
# comparison between nested domains


@dataclass
class ComparisonReport:
    pairs: int
    violations: int
    max_violation: float


def metric_comparison_check(inner, outer, points, tol=1e-9, rng=None, pairs=None):
    """Check ``d_outer(x, y) <= d_inner(x, y)`` on sampled pairs.

    ``points`` are interior to ``inner``; containment in ``outer`` is
    checked first and a failure raises ContainmentError.
    """
    points = np.atleast_2d(np.asarray(points, float))
    if not np.all(inner.contains(points)):
        raise DomainError("sample points must be interior to the inner domain")
    if not np.all(outer.contains(points)):
        raise ContainmentError("sampled point of the inner domain is outside the outer one")
    rng = np.random.default_rng(0) if rng is None else rng
    n = points.shape[0]
    if pairs is None:
        i, j = rng.integers(0, n, size=(2, n))
    else:
        i, j = pairs
    x, y = points[i], points[j]
    d_in = hilbert_distance(inner, x, y)
    d_out = hilbert_distance(outer, x, y)
    excess = d_out - d_in
    allowed = tol * (1.0 + np.abs(d_in))
    return ComparisonReport(int(len(i)), int(np.sum(excess > allowed)),
                            float(max(np.max(excess), 0.0)))

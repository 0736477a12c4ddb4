"""Sampled curves, tolerances, and chart maps between sphere and plane.

A curve is a dense sample of a C^2 immersion into the plane, the unit
sphere, or euclidean 3-space.  All downstream counting (inflections,
vertices, double points) runs on these samples, so the resampling and
differentiation kernels here are the accuracy floor of the whole package:
both are second order in the sample spacing, and curves that carry an
analytic generator are differentiated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateCurve,
    InsufficientSamples,
    NotInHemisphere,
    NotSimple,
    PoleOnCurve,
)

AMBIENTS = ("plane", "sphere", "space")


@dataclass
class Tolerances:
    """Numerical thresholds used by every counting routine.

    eps_zero       relative dead band for sign detection of scalar fields
                   (scaled by max |field|)
    eps_match      relative coincidence threshold (scaled by curve diameter)
    eps_unit       absolute unit-norm/orthogonality drift allowed
    eps_hull       margin for convex-hull membership classification
    eps_speed      relative speed threshold below which a sample is treated
                   as a singular-point candidate; much looser than eps_zero
                   because a sampled cusp never reaches an exact zero
    turn_angle     discrete turning angle (radians) above which a vertex of
                   the sample polygon is treated as a tangent reversal
    cluster_gaps   width of a zero cluster, in sample gaps
    degenerate_fraction
                   fraction of samples inside the dead band beyond which a
                   count is reported as DEGENERATE (and, for pair sets,
                   fraction of involved samples beyond which INFINITE)
    bisect_tol     |area - 2pi| threshold for the bisecting flag
    """

    eps_zero: float = 1e-6
    eps_match: float = 1e-6
    eps_unit: float = 1e-10
    eps_hull: float = 1e-6
    eps_speed: float = 1e-3
    turn_angle: float = 2.5
    cluster_gaps: int = 4
    degenerate_fraction: float = 0.25
    bisect_tol: float = 1e-2

    def zero_band(self, values):
        """Absolute dead band for a scalar field."""
        m = float(np.max(np.abs(values))) if len(values) else 0.0
        return self.eps_zero * m

    def match_radius(self, diameter):
        """Absolute coincidence threshold for a curve of this diameter."""
        return self.eps_match * float(diameter)

    def cluster_width(self, params, period=None):
        """Absolute parameter width of a zero cluster (cluster_gaps gaps)."""
        gaps = np.diff(params)
        if period is not None and len(params) > 1:
            wrap = period - (params[-1] - params[0])
            gaps = np.append(gaps, wrap)
        return self.cluster_gaps * float(np.median(gaps))


DEFAULT_TOL = Tolerances()


@dataclass
class ScalarField:
    """Scalar values aligned with a curve's samples (curvature, torsion, ...).

    Carries just enough of the owning curve (params, closedness, period) to
    support cyclic sign counting and integration without holding the curve
    itself.  `scale`, when set, is a magnitude ceiling for the expression
    that produced the values (triangle-inequality bound); dead bands use it
    so that a field which is zero up to cancellation noise reads as
    degenerate rather than as noise crossings.
    """

    values: np.ndarray
    params: np.ndarray
    closed: bool = True
    period: Optional[float] = None
    name: str = ""
    scale: Optional[float] = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        self.params = np.ascontiguousarray(self.params, dtype=float)
        if self.values.shape != self.params.shape:
            raise ValueError("values and params must have matching shape")
        if self.closed and self.period is None:
            if len(self.params) > 1:
                span = self.params[-1] - self.params[0]
                self.period = float(span * len(self.params) / (len(self.params) - 1))
            else:
                self.period = 2.0 * np.pi

    @classmethod
    def over(cls, curve, values, name="", scale=None):
        return cls(
            values=values,
            params=curve.params.copy(),
            closed=curve.closed,
            period=curve.period,
            name=name,
            scale=scale,
        )

    def band(self, eps_zero):
        ref = self.scale
        if ref is None:
            ref = float(np.max(np.abs(self.values))) if len(self.values) else 0.0
        return eps_zero * ref

    def __len__(self):
        return len(self.values)


@dataclass
class SampledCurve:
    """A densely sampled parametrized curve.

    points   (n, d) float array of positions, d = 2 or 3
    params   (n,) strictly increasing parameter values
    closed   whether the curve wraps; a closed curve has a period and its
             last sample is *not* a repeat of the first
    ambient  "plane", "sphere" or "space"
    period   parametric period for closed curves (gamma(t + period) =
             gamma(t)); ignored for open arcs
    generator  optional analytic generator with a ``derivative(params, k)``
             method returning exact k-th derivatives; used by
             :func:`differentiate` when present
    """

    points: np.ndarray
    params: np.ndarray
    closed: bool = True
    ambient: str = "sphere"
    period: Optional[float] = None
    generator: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        self.params = np.ascontiguousarray(self.params, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] != self.params.shape[0]:
            raise ValueError("points and params must have matching length")
        if self.ambient not in AMBIENTS:
            raise ValueError("unknown ambient %r" % (self.ambient,))
        want = 2 if self.ambient == "plane" else 3
        if self.points.shape[1] != want:
            raise ValueError(
                "ambient %r needs %d coordinates, got %d"
                % (self.ambient, want, self.points.shape[1])
            )
        if len(self.params) > 1 and np.any(np.diff(self.params) <= 0):
            raise ValueError("params must be strictly increasing")
        if self.closed and self.n < 8:
            raise ValueError("closed curve needs at least 8 samples")
        if self.closed and self.period is None:
            # Default: samples are a uniform subdivision, the period extends
            # the mean gap past the last sample.
            if len(self.params) > 1:
                span = self.params[-1] - self.params[0]
                self.period = float(span * len(self.params) / (len(self.params) - 1))
            else:
                self.period = 2.0 * np.pi

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def diameter(self):
        """Cheap diameter proxy: diagonal of the bounding box."""
        ext = self.points.max(axis=0) - self.points.min(axis=0)
        return float(np.linalg.norm(ext))

    def gaps(self):
        """Chord lengths between consecutive samples (wrapping if closed)."""
        d = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        if self.closed:
            d = np.append(d, np.linalg.norm(self.points[0] - self.points[-1]))
        return d

    def length(self):
        return float(self.gaps().sum()) if self.closed else float(
            np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum()
        )

    def reversed(self):
        """Same point set traversed backwards."""
        pts = self.points[::-1].copy()
        if self.closed:
            base = self.params[0]
            prm = base + (self.params[0] + self.period - self.params[::-1])
            prm[0] = base
        else:
            prm = self.params[0] + (self.params[-1] - self.params[::-1])
        return replace(self, points=pts, params=prm, generator=None)

    def with_points(self, points):
        return replace(self, points=np.asarray(points, dtype=float), generator=None)


def _check_sphere(curve, tol):
    r = np.linalg.norm(curve.points, axis=1)
    if np.any(np.abs(r - 1.0) > 1e-6):
        raise ValueError("sphere curve has samples off the unit sphere")


def _spline(curve):
    """Interpolating cubic spline through the samples (periodic if closed)."""
    if curve.closed:
        x = np.append(curve.params, curve.params[0] + curve.period)
        y = np.vstack([curve.points, curve.points[:1]])
        return CubicSpline(x, y, bc_type="periodic")
    return CubicSpline(curve.params, curve.points)


def resample_arclength(curve, n, tol: Tolerances = DEFAULT_TOL):
    """Return the curve resampled at ``n`` points equally spaced in arc length.

    The samples are taken on an interpolating cubic spline (periodic for
    closed curves), so for smooth inputs the output gap uniformity is far
    inside the 1% contract even from coarse input.  Sphere samples are
    renormalized after interpolation.  New params are arc length, starting
    at zero.
    """
    if n < 4:
        raise ValueError("need at least 4 samples")
    if curve.n < 4:
        raise DegenerateCurve("too few samples to resample")
    cs = _spline(curve)
    lo = curve.params[0]
    hi = lo + curve.period if curve.closed else curve.params[-1]
    m = max(4096, 8 * max(n, curve.n))
    td = np.linspace(lo, hi, m + 1)
    pd = cs(td)
    if curve.ambient == "sphere":
        pd /= np.linalg.norm(pd, axis=1, keepdims=True)
    seg = np.linalg.norm(np.diff(pd, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total <= 0 or not np.isfinite(total):
        raise DegenerateCurve("curve has no length")
    if curve.closed:
        targets = np.linspace(0.0, total, n, endpoint=False)
    else:
        targets = np.linspace(0.0, total, n)
    tq = np.interp(targets, s, td)
    pts = cs(tq)
    if curve.ambient == "sphere":
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return SampledCurve(
        points=pts,
        params=targets,
        closed=curve.closed,
        ambient=curve.ambient,
        period=total if curve.closed else None,
    )


def _uniform_spacing(params, period, closed):
    gaps = np.diff(params)
    if closed:
        gaps = np.append(gaps, period - (params[-1] - params[0]))
    h = gaps.mean()
    uniform = np.allclose(gaps, h, rtol=1e-9, atol=1e-12 * max(h, 1.0))
    return (h if uniform else None), gaps


def differentiate(curve, order=1, tol: Tolerances = DEFAULT_TOL):
    """k-th derivative of the position samples with respect to the parameter.

    Uses exact generator derivatives when the curve carries a generator,
    otherwise central finite differences of second-order accuracy (periodic
    wrap for closed curves, one-sided at open endpoints).
    """
    if order < 1 or order > 3:
        raise ValueError("order must be 1, 2 or 3")
    need = 5 if curve.closed else 2 * order + 2
    if curve.n < need:
        raise InsufficientSamples(
            "order-%d derivative needs at least %d samples" % (order, need)
        )
    if curve.generator is not None:
        return np.asarray(curve.generator.derivative(curve.params, order), dtype=float)
    p = curve.points
    h, _ = _uniform_spacing(curve.params, curve.period, curve.closed)
    if curve.closed and h is not None:
        return _stencil_periodic(p, h, order)
    # Non-uniform or open: nested gradients on a padded array.
    t = curve.params.copy()
    pts = p
    if curve.closed:
        k = order + 1
        t = np.concatenate(
            [t[-k:] - curve.period, t, t[:k] + curve.period]
        )
        pts = np.vstack([p[-k:], p, p[:k]])
    d = pts
    for _ in range(order):
        d = np.gradient(d, t, axis=0, edge_order=2)
    if curve.closed:
        d = d[order + 1 : -(order + 1)]
    return d


class NormalizedTangentGenerator:
    """Exact derivatives of t -> F'(t)/|F'(t)| given exact derivatives of F.

    Wraps a base generator so the unit-tangent image of an analytically
    generated curve is itself analytically differentiable (chain rule on
    G u where G = F', u = 1/|G|).  Needs base derivatives up to order + 1.
    """

    def __init__(self, base):
        self.base = base

    def __call__(self, t):
        g = np.asarray(self.base.derivative(t, 1), dtype=float)
        return g / np.linalg.norm(g, axis=-1, keepdims=True)

    def derivative(self, t, order):
        t = np.asarray(t, dtype=float)
        g = [np.asarray(self.base.derivative(t, k + 1), dtype=float)
             for k in range(order + 1)]
        r = np.linalg.norm(g[0], axis=-1)
        dot = lambda a, b: np.einsum("...i,...i->...", a, b)
        r1 = dot(g[0], g[1]) / r
        u = 1.0 / r
        u1 = -r1 * u * u
        if order == 1:
            return g[1] * u[..., None] + g[0] * u1[..., None]
        r2 = (dot(g[1], g[1]) + dot(g[0], g[2]) - r1 * r1) / r
        u2 = -r2 * u * u + 2.0 * r1 * r1 * u**3
        if order == 2:
            return (g[2] * u[..., None] + 2.0 * g[1] * u1[..., None]
                    + g[0] * u2[..., None])
        r3 = (3.0 * dot(g[1], g[2]) + dot(g[0], g[3]) - 3.0 * r1 * r2) / r
        u3 = -r3 * u * u + 6.0 * r1 * r2 * u**3 - 6.0 * r1**3 * u**4
        if order == 3:
            return (g[3] * u[..., None] + 3.0 * g[2] * u1[..., None]
                    + 3.0 * g[1] * u2[..., None] + g[0] * u3[..., None])
        raise ValueError("order must be 1, 2 or 3")


def _stencil_periodic(p, h, order):
    m1 = np.roll(p, 1, axis=0)
    p1 = np.roll(p, -1, axis=0)
    if order == 1:
        return (p1 - m1) / (2.0 * h)
    if order == 2:
        return (p1 - 2.0 * p + m1) / (h * h)
    m2 = np.roll(p, 2, axis=0)
    p2 = np.roll(p, -2, axis=0)
    return (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h**3)


def _frame(pole):
    """Right-handed orthonormal frame (e1, e2, pole)."""
    u = np.asarray(pole, dtype=float)
    u = u / np.linalg.norm(u)
    a = np.array([0.0, 0.0, 1.0]) if abs(u[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(a, u)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return e1, e2, u


def beltrami_project(curve, pole, tol: Tolerances = DEFAULT_TOL):
    """Central (gnomonic) projection onto the tangent plane at ``pole``.

    Maps great circles to straight lines and preserves the sign of geodesic
    curvature, hence the positions and signs of inflections.  Every sample
    must lie strictly inside the open hemisphere around ``pole``.
    """
    if curve.ambient != "sphere":
        raise ValueError("central projection needs a sphere curve")
    _check_sphere(curve, tol)
    e1, e2, u = _frame(pole)
    c = curve.points @ u
    margin = max(tol.match_radius(2.0), tol.eps_unit)
    bad = np.nonzero(c <= margin)[0]
    if len(bad):
        raise NotInHemisphere(
            "%d samples outside the open hemisphere" % len(bad), indices=bad
        )
    w = curve.points / c[:, None]
    xy = np.column_stack([w @ e1, w @ e2])
    return SampledCurve(
        points=xy,
        params=curve.params.copy(),
        closed=curve.closed,
        ambient="plane",
        period=curve.period,
    )


def beltrami_unproject(curve, pole, tol: Tolerances = DEFAULT_TOL):
    """Inverse central projection; the image lies in the open hemisphere."""
    if curve.ambient != "plane":
        raise ValueError("inverse central projection needs a plane curve")
    e1, e2, u = _frame(pole)
    x, y = curve.points[:, 0], curve.points[:, 1]
    v = x[:, None] * e1 + y[:, None] * e2 + u
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return SampledCurve(
        points=v,
        params=curve.params.copy(),
        closed=curve.closed,
        ambient="sphere",
        period=curve.period,
    )


def stereographic_project(curve, pole=(0.0, 0.0, 1.0), tol: Tolerances = DEFAULT_TOL):
    """Stereographic projection from ``pole`` to the equatorial plane.

    Conformal: maps circles to circles and preserves vertices (local
    extrema of curvature).  The equator of ``pole`` maps to the unit
    circle.  Fails if the curve passes within the match radius of the pole.
    """
    if curve.ambient != "sphere":
        raise ValueError("stereographic projection needs a sphere curve")
    _check_sphere(curve, tol)
    e1, e2, u = _frame(pole)
    c = curve.points @ u
    near = np.nonzero(1.0 - c <= tol.match_radius(2.0)) [0]
    if len(near):
        raise PoleOnCurve("curve passes through the projection pole")
    a = curve.points @ e1
    b = curve.points @ e2
    xy = np.column_stack([a, b]) / (1.0 - c)[:, None]
    return SampledCurve(
        points=xy,
        params=curve.params.copy(),
        closed=curve.closed,
        ambient="plane",
        period=curve.period,
    )


def stereographic_unproject(curve, pole=(0.0, 0.0, 1.0), tol: Tolerances = DEFAULT_TOL):
    """Inverse stereographic projection from the equatorial plane."""
    if curve.ambient != "plane":
        raise ValueError("inverse stereographic projection needs a plane curve")
    e1, e2, u = _frame(pole)
    x, y = curve.points[:, 0], curve.points[:, 1]
    r2 = x * x + y * y
    denom = (1.0 + r2)[:, None]
    v = (2.0 * x[:, None] * e1 + 2.0 * y[:, None] * e2 + (r2 - 1.0)[:, None] * u) / denom
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return SampledCurve(
        points=v,
        params=curve.params.copy(),
        closed=curve.closed,
        ambient="sphere",
        period=curve.period,
    )


def gauss_bonnet_residual(curve, side="left", tol: Tolerances = DEFAULT_TOL):
    """Residual of the Gauss-Bonnet identity on the unit sphere.

    For a simple closed spherical curve bounding a region Omega on the
    requested side, returns  integral(k ds) + Area(Omega) - 2*pi.  The
    curvature integral uses the smooth (derivative-based) geodesic
    curvature while the area comes from the discrete turning-angle count,
    so the residual is a real consistency check of the sampling, O(h^2).
    """
    from . import incidence, invariants

    if curve.ambient != "sphere":
        raise ValueError("Gauss-Bonnet check needs a sphere curve")
    if not curve.closed:
        raise ValueError("Gauss-Bonnet check needs a closed curve")
    crossings, _ = incidence.coincidence_pairs(curve, tol)
    if crossings.count != 0:
        raise NotSimple("curve is not embedded")
    k = invariants.geodesic_curvature(curve, tol)
    v = differentiate(curve, 1, tol)
    speed = np.linalg.norm(v, axis=1)
    # cyclic trapezoid rule for the total geodesic curvature
    gaps = np.diff(curve.params)
    gaps = np.append(gaps, curve.period - (curve.params[-1] - curve.params[0]))
    f = k.values * speed
    integral = float(np.sum(0.5 * (f + np.roll(f, -1)) * gaps))
    areas = incidence.enclosed_area(curve, tol, assume_simple=True)
    area = areas.left if side == "left" else areas.right
    if side == "right":
        integral = -integral
    return integral + area - 2.0 * np.pi

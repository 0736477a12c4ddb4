"""Curve constructors.

Everything here produces SampledCurve instances for the rest of the
package to measure: integration of a prescribed geodesic curvature,
closing up a nearly closed arc, recovering a space curve from its unit
tangent image, hand-built families that meet the count inequalities with
equality, and seeded random loops for bulk testing.
"""

import numpy as np
from dataclasses import dataclass, field
from scipy.interpolate import CubicSpline

from .geom import (
    DEFAULT_TOL,
    NormalizedTangentGenerator,
    SampledCurve,
    ScalarField,
    Tolerances,
    stereographic_unproject,
)
from .errors import (
    ConstraintUnsatisfiable,
    DegenerateCurve,
    HullViolation,
    InfeasibleSpeed,
    InvalidTriple,
    MismatchTooLarge,
    MultipleSingularity,
    NotSimple,
    PreconditionViolated,
    SurgeryContractViolated,
)
from .invariants import (
    invariant_report,
    is_finite_count,
    singular_points,
)
from . import incidence
from .surgery import (
    _arc_points,
    _assemble_window,
    _bisect,
    _cross2,
    _from_chart,
    _report_counts,
    _segment_points,
    _smooth_near,
    _splice_window,
    _to_chart,
    _window_run,
    _ArmPath,
    desingularize,
)

__all__ = [
    "FourierLoop",
    "ArcAssembly",
    "curve_from_geodesic_curvature",
    "close_up",
    "integrate_tantrix",
    "sharp_example",
    "sharp_triples",
    "default_variant",
    "random_fourier_loop",
]


# ---------------------------------------------------------------------------
# generator types


class _PrimitiveShift:
    """Present F as the derivative of its own primitive.

    Feeding this to the unit-tangent chain rule differentiates F/|F|
    instead of F'/|F'|, which is exactly what a radially normalized
    closed loop needs.
    """

    def __init__(self, base):
        self.base = base

    def derivative(self, t, order):
        return self.base._raw(t, order - 1)


@dataclass
class FourierLoop:
    """A 2 pi periodic trigonometric loop with exact derivatives.

    cos_coeffs and sin_coeffs have shape (degree + 1, dim); row k holds
    the frequency-k coefficients (row 0 of sin_coeffs is inert).  With
    ambient "sphere" the evaluation is radially normalized and the
    derivatives are those of the normalized map, so curves built from
    this generator are differentiated analytically rather than by
    divided differences.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    ambient: str = "space"
    seed: object = None

    def __post_init__(self):
        self.cos_coeffs = np.atleast_2d(np.asarray(self.cos_coeffs, dtype=float))
        self.sin_coeffs = np.atleast_2d(np.asarray(self.sin_coeffs, dtype=float))
        if self.cos_coeffs.shape != self.sin_coeffs.shape:
            raise ValueError("coefficient arrays must share a shape")
        want = 2 if self.ambient == "plane" else 3
        if self.cos_coeffs.shape[1] != want:
            raise ValueError("ambient %r needs %d coordinates" % (self.ambient, want))

    @property
    def degree(self):
        return self.cos_coeffs.shape[0] - 1

    def _raw(self, t, order):
        t = np.asarray(t, dtype=float)
        k = np.arange(self.degree + 1, dtype=float)
        kt = np.multiply.outer(t, k)
        ck = np.cos(kt)
        sk = np.sin(kt)
        phase = order % 4
        if phase == 0:
            fc, fs = ck, sk
        elif phase == 1:
            fc, fs = -sk, ck
        elif phase == 2:
            fc, fs = -ck, -sk
        else:
            fc, fs = sk, -ck
        w = k**order
        return (fc * w) @ self.cos_coeffs + (fs * w) @ self.sin_coeffs

    def evaluate(self, t):
        p = self._raw(t, 0)
        if self.ambient == "sphere":
            p = p / np.linalg.norm(p, axis=-1, keepdims=True)
        return p

    def derivative(self, t, order):
        if self.ambient != "sphere":
            return self._raw(t, order)
        return NormalizedTangentGenerator(_PrimitiveShift(self)).derivative(t, order)

    def curve(self, n=512, tol: Tolerances = DEFAULT_TOL):
        """Sample the loop at n uniform parameters, generator attached."""
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        pts = self.evaluate(t)
        speed = np.linalg.norm(self.derivative(t, 1), axis=1)
        if speed.min() <= tol.eps_zero:
            raise DegenerateCurve("loop is not regular at this sampling")
        return SampledCurve(
            points=pts, params=t, closed=True, ambient=self.ambient,
            period=2.0 * np.pi, generator=self,
        )


@dataclass
class ArcAssembly:
    """Circular arcs in the plane chained end to end.

    Each arc is (center, radius, theta0, theta1, sense): the traversal
    runs from angle theta0 to theta1 around the center in the given
    rotational sense.  Junction tags record the intended continuity:
    "cusp" for a tangent reversal, "c1" for a tangent match, "c2" for a
    curvature blend.  Consecutive arcs must share endpoints.
    """

    arcs: list
    junctions: tuple = ()
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        scale = max(
            float(np.linalg.norm(c) + abs(r)) for c, r, _, _, _ in self._norm_arcs()
        )
        eps = self.tol.eps_match * max(scale, 1e-300)
        ends = [self.endpoint(i) for i in range(len(self.arcs))]
        starts = [self.startpoint(i) for i in range(len(self.arcs))]
        for i in range(len(self.arcs)):
            nxt = (i + 1) % len(self.arcs)
            if np.linalg.norm(ends[i] - starts[nxt]) > eps:
                raise ValueError("arc %d does not meet arc %d" % (i, nxt))

    def _norm_arcs(self):
        out = []
        for a in self.arcs:
            c, r, t0, t1, sense = a
            out.append((np.asarray(c, dtype=float), float(r), float(t0),
                        float(t1), float(np.sign(sense) or 1.0)))
        return out

    def _point(self, i, theta):
        c, r, _, _, _ = self._norm_arcs()[i]
        return c + r * np.array([np.cos(theta), np.sin(theta)])

    def startpoint(self, i):
        return self._point(i, self._norm_arcs()[i][2])

    def endpoint(self, i):
        return self._point(i, self._norm_arcs()[i][3])

    def _spans(self):
        spans = []
        for c, r, t0, t1, sense in self._norm_arcs():
            span = (sense * (t1 - t0)) % (2.0 * np.pi)
            if span < 1e-12:
                span = 2.0 * np.pi
            spans.append(span)
        return np.asarray(spans)

    def chart_points(self, n):
        """n chart samples along the whole assembly, arc length weighted.

        Every junction lands exactly on a sample.
        """
        arcs = self._norm_arcs()
        spans = self._spans()
        lengths = np.asarray([abs(r) * s for (_, r, _, _, _), s in zip(arcs, spans)])
        counts = np.maximum(np.round(n * lengths / lengths.sum()).astype(int), 4)
        while counts.sum() != n:
            counts[int(np.argmax(counts))] += 1 if counts.sum() < n else -1
        pieces = []
        for (c, r, t0, _, sense), span, m in zip(arcs, spans, counts):
            th = t0 + sense * span * np.arange(m) / m
            pieces.append(c + r * np.column_stack([np.cos(th), np.sin(th)]))
        return np.vstack(pieces)

    def lift(self, n, tol: Tolerances = DEFAULT_TOL):
        """Spherical curve through inverse stereographic projection."""
        return _lift_chart_points(self.chart_points(max(n, 64)), tol)


def _lift_chart_points(xy, tol, params=None, period=None):
    n = len(xy)
    if params is None:
        params = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        period = 2.0 * np.pi
    plane = SampledCurve(points=xy, params=params, closed=True,
                         ambient="plane", period=period)
    return stereographic_unproject(plane, tol=tol)


# ---------------------------------------------------------------------------
# prescribed curvature integration


def _field_spline(k: ScalarField):
    x = np.asarray(k.params, dtype=float)
    y = np.asarray(k.values, dtype=float)
    if k.closed:
        period = k.period if k.period is not None else (
            x[-1] - x[0] + np.median(np.diff(x)))
        xx = np.append(x, x[0] + period)
        yy = np.append(y, y[0])
        base = CubicSpline(xx, yy, bc_type="periodic")
        lo = x[0]
        return (lambda s: base(lo + (s - lo) % period)), period
    if len(x) < 4:
        return (lambda s: np.interp(s, x, y)), x[-1] - x[0]
    base = CubicSpline(x, y)
    return base, x[-1] - x[0]


def curve_from_geodesic_curvature(k: ScalarField, init_point=(1.0, 0.0, 0.0),
                                  init_direction=(0.0, 1.0, 0.0), n=None,
                                  tol: Tolerances = DEFAULT_TOL):
    """Integrate a unit-speed spherical curve with geodesic curvature k.

    The frame (point, tangent) evolves by p' = T, T' = -p + k (p x T);
    a classical four-stage one-step scheme advances it and each step is
    followed by re-orthonormalization, so the output stays on the sphere
    to machine precision while keeping fourth-order accuracy.  The
    result is an open arc over [0, L] where L is the parameter span of
    the curvature field; it closes only when k is the curvature of a
    closed curve.
    """
    kfun, L = _field_spline(k)
    if not np.isfinite(L) or L <= 0:
        raise DegenerateCurve("curvature field has no parameter span")
    p0 = np.asarray(init_point, dtype=float)
    norm0 = np.linalg.norm(p0)
    if norm0 <= tol.eps_zero:
        raise PreconditionViolated("initial point is at the origin")
    p0 = p0 / norm0
    T0 = np.asarray(init_direction, dtype=float)
    T0 = T0 - (T0 @ p0) * p0
    nT = np.linalg.norm(T0)
    if nT <= tol.eps_zero:
        raise PreconditionViolated("initial direction is radial")
    T0 = T0 / nT

    if n is None:
        n = max(1024, 2 * len(np.atleast_1d(k.values)))
    s = np.asarray(k.params[0], dtype=float) + np.linspace(0.0, L, n + 1)
    h = np.diff(s)
    k_at = kfun(s)
    k_mid = kfun(0.5 * (s[:-1] + s[1:]))

    P = np.empty((n + 1, 3))
    T = np.empty((n + 1, 3))
    P[0], T[0] = p0, T0
    for i in range(n):
        hi = h[i]
        ka, km, kb = k_at[i], k_mid[i], k_at[i + 1]
        p, t = P[i], T[i]
        k1p = t
        k1t = -p + ka * np.cross(p, t)
        p2, t2 = p + 0.5 * hi * k1p, t + 0.5 * hi * k1t
        k2p = t2
        k2t = -p2 + km * np.cross(p2, t2)
        p3, t3 = p + 0.5 * hi * k2p, t + 0.5 * hi * k2t
        k3p = t3
        k3t = -p3 + km * np.cross(p3, t3)
        p4, t4 = p + hi * k3p, t + hi * k3t
        k4p = t4
        k4t = -p4 + kb * np.cross(p4, t4)
        pn = p + (hi / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        tn = t + (hi / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        pn = pn / np.linalg.norm(pn)
        tn = tn - (tn @ pn) * pn
        tn = tn / np.linalg.norm(tn)
        P[i + 1], T[i + 1] = pn, tn
    return SampledCurve(points=P, params=s - s[0], closed=False, ambient="sphere")


def _quintic_fade(u):
    """C2 step from 1 at u=0 down to 0 at u=1."""
    u = np.clip(u, 0.0, 1.0)
    return 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u * u)


def close_up(curve: SampledCurve, delta, tol: Tolerances = DEFAULT_TOL):
    """Close a nearly closed open arc by blending one end window.

    Over the final window of parametric width ``delta`` the arc is
    blended with its own continuation carried back one period: for a
    unit-speed arc whose curvature repeats with the period, the exact
    continuation is the rotation taking the start frame to the end
    frame, so the target strand is R^T gamma(t) with R that rotation.
    The blend weight is a quintic step, which keeps the join twice
    differentiable, and the result is renormalized to the sphere.
    Samples before the window are untouched.
    """
    if curve.closed:
        raise ValueError("close_up expects an open arc")
    if curve.ambient != "sphere":
        raise ValueError("close_up expects a spherical arc")
    t = curve.params
    p = curve.points
    L = float(t[-1] - t[0])
    w = float(delta)
    if not (0.0 < w < 0.5 * L):
        raise ValueError("blend window must be positive and under half the span")
    gap = float(np.linalg.norm(p[-1] - p[0]))
    if gap > 0.25 * w:
        raise MismatchTooLarge(
            "endpoint gap %.3g exceeds what a window of %.3g can absorb" % (gap, w))

    # frames at both ends; tangents from one-sided differences
    def frame_at(idx, other):
        tang = p[other] - p[idx]
        tang = tang - (tang @ p[idx]) * p[idx]
        nrm = np.linalg.norm(tang)
        if nrm <= tol.eps_zero:
            raise DegenerateCurve("end tangent vanishes")
        tang = tang / nrm if other > idx else -tang / nrm
        return np.column_stack([p[idx], tang, np.cross(p[idx], tang)])

    F0 = frame_at(0, 1)
    F1 = frame_at(-1, -2)
    R = F1 @ F0.T
    U, _, Vt = np.linalg.svd(R)
    R = U @ Vt

    mask = t >= t[-1] - w
    phi = _quintic_fade((t[mask] - (t[-1] - w)) / w)
    shadow = p[mask] @ R  # row-vector form of R^T applied to each sample
    blended = phi[:, None] * p[mask] + (1.0 - phi)[:, None] * shadow
    pts = p.copy()
    pts[mask] = blended
    pts = pts[:-1]
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    return SampledCurve(points=pts, params=t[:-1] - t[0], closed=True,
                        ambient="sphere", period=L)


# ---------------------------------------------------------------------------
# tantrix integration


def _flat_relative_interior(points, tol):
    """Origin strictly inside the hull of a rank-deficient point set.

    A planar tangent image (a great circle, say) puts the origin on the
    topological boundary of its hull while still admitting a positive
    closing speed; what matters is the interior relative to the span.
    """
    P = np.asarray(points, dtype=float)
    scale = max(float(np.linalg.norm(P, axis=1).max()), 1e-300)
    _, sv, Vt = np.linalg.svd(P, full_matrices=False)
    if sv[-1] > 1e-6 * sv[0]:
        return False
    normal = Vt[-1]
    if np.max(np.abs(P @ normal)) > tol.eps_hull * scale:
        return False
    q = P @ Vt[:2].T
    th = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    dirs = np.column_stack([np.cos(th), np.sin(th)])
    support = (dirs @ q.T).max(axis=1)
    return bool(support.min() > tol.eps_hull * scale)


def integrate_tantrix(T: SampledCurve, v_min=0.1, tol: Tolerances = DEFAULT_TOL,
                      max_rounds=400):
    """Closed space curve whose unit tangent image is the given curve.

    Needs the origin strictly inside the convex hull of the samples;
    otherwise every positive speed drifts and no closed curve exists.
    The speed is the least-norm perturbation of 1 satisfying the three
    closure constraints, pushed above ``v_min`` by alternating clipping
    with reprojection.  Integration uses the cyclic trapezoid rule, so
    the discrete closure residual is at rounding level.
    """
    if T.ambient != "sphere":
        raise ValueError("integrate_tantrix expects a spherical curve")
    if not T.closed:
        raise ValueError("integrate_tantrix expects a closed curve")
    hull = incidence.origin_in_hull(T.points, tol)
    if hull.status == "outside" or (
            hull.status == "boundary" and not _flat_relative_interior(T.points, tol)):
        raise HullViolation(
            "tangent image leaves the origin on or outside its hull (%s)"
            % hull.status)
    t = T.params
    n = T.n
    gaps = np.diff(np.append(t, t[0] + T.period))
    w = 0.5 * (gaps + np.roll(gaps, 1))
    A = (T.points * w[:, None]).T
    # pseudoinverse: the constraint matrix drops rank for planar images
    Minv = np.linalg.pinv(A @ A.T, rcond=1e-12)

    def project(v):
        return v - A.T @ (Minv @ (A @ v))

    ones = np.ones(n)
    v = project(ones)
    for _ in range(max_rounds):
        if v.min() >= v_min - 1e-12:
            break
        v = np.clip(v, v_min, None)
        v = project(v)
    v = project(np.clip(v, v_min, None))
    if v.min() < v_min * (1.0 - 1e-3):
        raise InfeasibleSpeed("no positive speed meets the closure constraints")
    if np.linalg.norm(A @ v) > 1e-9 * n:
        raise InfeasibleSpeed("speed projection failed to close the loop")

    vel = v[:, None] * T.points
    edges = 0.5 * gaps[:, None] * (vel + np.roll(vel, -1, axis=0))
    pts = np.vstack([np.zeros(3), np.cumsum(edges, axis=0)[:-1]])
    return SampledCurve(points=pts, params=t.copy(), closed=True,
                        ambient="space", period=T.period)


# ---------------------------------------------------------------------------
# singularity-to-loop replacement


def _arm_turn_sign(win, iv):
    seg = np.diff(win, axis=0)
    cr = seg[:-1, 0] * seg[1:, 1] - seg[:-1, 1] * seg[1:, 0]
    keep = np.abs(np.arange(len(cr)) - (iv - 1)) > 2
    total = float(cr[keep].sum()) if keep.any() else float(cr.sum())
    return 1.0 if total >= 0.0 else -1.0


def _graze_tangent_line(path, center, orient, offset):
    """First arclength where the travel line touches the circle.

    The travel direction along the arm is orient * path tangent; the
    line through path.point(s) with that direction must pass the circle
    center at signed perpendicular distance ``offset``.
    """
    lo = min(2.0 * path.L / len(path.pts), 0.2 * path.L)

    def f(s):
        d = orient * path.tangent(s)
        return _cross2(d, center - path.point(s)) - offset

    ss = np.linspace(lo, path.L * 0.98, 160)
    vals = np.array([f(s) for s in ss])
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        return None
    j = int(flips[0])
    return _bisect(f, ss[j], ss[j + 1], vals[j])


def _loop_candidates(win, iv, spacing, loop_r):
    pa = _ArmPath(win[: iv + 1][::-1])
    pb = _ArmPath(win[iv:])
    v = win[iv]
    sig = _arm_turn_sign(win, iv)
    ma = pa.point(0.5 * pa.L) - v
    mb = pb.point(0.5 * pb.L) - v
    na, nb = np.linalg.norm(ma), np.linalg.norm(mb)
    if na <= 0 or nb <= 0:
        return
    ax = ma / na + mb / nb
    nx = np.linalg.norm(ax)
    if nx <= 1e-12:
        return
    ax = ax / nx
    for fac in (1.0, 0.7, 1.45, 0.5):
        r = loop_r * fac
        for dfac in (2.0, 2.6, 3.4, 4.4):
            c = v - dfac * r * ax
            sa = _graze_tangent_line(pa, c, -1.0, sig * r)
            sb = _graze_tangent_line(pb, c, +1.0, sig * r)
            if sa is None or sb is None:
                continue
            A, B = pa.point(sa), pb.point(sb)
            da, db = -pa.tangent(sa), pb.tangent(sb)
            ua = float((c - A) @ da)
            ub = float((c - B) @ db)
            if ua < 0.3 * r or ub > -0.3 * r:
                continue
            P1 = A + ua * da
            P2 = B + ub * db
            arc = _arc_points(c, r, P1, P2, sig, min(spacing, 0.2 * r))
            mid = np.vstack([
                _segment_points(A, P1, spacing),
                arc,
                _segment_points(P2, B, spacing),
            ])
            new_win, (j1, j2) = _assemble_window(win, iv, sa, sb, mid)
            yield new_win, list(range(j1 - 1, j1 + 2)) + list(range(j2 - 1, j2 + 2))


def _loop_at_singularity(curve: SampledCurve, p, radius, loop_r,
                         tol: Tolerances = DEFAULT_TOL):
    """Replace the cusp near parameter p by a small loop.

    The neighborhood is rebuilt with a circle placed past the vortex,
    reached by the tangent lines of both arms; the two connecting
    segments cross once, so the singularity is traded for one new
    self-intersection while the combined count 2(D+ + S) + I and the
    inflection count stay put.
    """
    S0 = singular_points(curve, tol)
    if not (is_finite_count(S0.count) and S0.count > 0):
        raise PreconditionViolated("curve has no isolated singular points")
    period = curve.period
    d = np.abs(S0.locations - p) % period
    d = np.minimum(d, period - d)
    kq = int(np.argmin(d))
    if d[kq] > 0.1 * period:
        raise PreconditionViolated("no singular point near the requested parameter")
    vortex_param = float(S0.locations[kq])
    dd = np.abs(curve.params - vortex_param)
    idx0 = int(np.argmin(np.minimum(dd, period - dd)))

    lo, hi, extra = _window_run(curve.points, idx0, radius)
    if extra:
        raise MultipleSingularity("another strand passes through the neighborhood")
    rep_b, I_b, S_b, Dp_b, sp_b = _report_counts(curve, tol, PreconditionViolated)

    n = curve.n
    idxs = np.arange(lo, hi + 1) % n
    raw = curve.points[idxs]
    q0 = curve.points[idx0]
    win = _to_chart(raw, q0) if curve.ambient == "sphere" else raw - q0
    iv = int(np.nonzero(idxs == idx0)[0][0])
    if iv < 4 or len(win) - iv < 5:
        raise PreconditionViolated("singular point too close to the window edge")
    spacing = float(np.median(np.linalg.norm(np.diff(win, axis=0), axis=1)))

    built = False
    for new_win, junctions in _loop_candidates(win, iv, spacing, loop_r):
        built = True
        if junctions:
            new_win = _smooth_near(new_win, junctions, half=3, passes=2, closed=False)
        back = _from_chart(new_win, q0) if curve.ambient == "sphere" else new_win + q0
        out = _splice_window(curve, lo, hi, back)
        try:
            rep_a, I_a, S_a, Dp_a, sp_a = _report_counts(out, tol)
        except SurgeryContractViolated:
            continue
        if S_a != S_b - 1 or Dp_a != Dp_b + 1 or I_a != I_b or sp_a != sp_b:
            continue
        if is_finite_count(rep_b.D.count) and rep_a.D.count != rep_b.D.count + 1:
            continue
        return out
    if not built:
        raise SurgeryContractViolated("no loop construction fit the neighborhood")
    raise SurgeryContractViolated("every loop candidate violated the count contract")


# ---------------------------------------------------------------------------
# sharp example families


_FAMILIES = ("eq3", "eq4", "eq5")


def sharp_triples(family):
    """All triples realizing equality in the given family inequality."""
    if family == "eq3":
        return [(D, S, 6 - 2 * (D + S))
                for D in range(4) for S in range(4 - D)]
    if family == "eq4":
        return [(Dp, S, 4 - 2 * (Dp + S))
                for Dp in range(3) for S in range(3 - Dp)]
    if family == "eq5":
        return [(0, 2, 2), (2, 0, 2), (0, 0, 6)]
    raise InvalidTriple("unknown family %r" % (family,))


def _treatments(target, family):
    """(loops, smoothings, kept cusps) demanded by the target triple."""
    a, b, c = (int(x) for x in target)
    if a < 0 or b < 0 or c < 0 or c % 2:
        raise InvalidTriple("counts must be nonnegative with an even third entry")
    if family == "eq3":
        if 2 * (a + b) + c != 6:
            raise InvalidTriple("%r does not meet 2(D + S) + I = 6" % (target,))
        return a, c // 2, b
    if family == "eq4":
        if 2 * (a + b) + c != 4:
            raise InvalidTriple("%r does not meet 2(D+ + S) + I = 4" % (target,))
        return a, c // 2, b
    if family == "eq5":
        if (a, b, c) not in sharp_triples("eq5"):
            raise InvalidTriple(
                "%r is not a symmetric equality triple" % (target,))
        # per-pole treatment; the base already carries two inflections
        return a // 2, (c - 2) // 2, b // 2
    raise InvalidTriple("unknown family %r" % (family,))


def default_variant(target, family):
    """A variant tag consistent with the triple (for corpus drivers)."""
    loops, smooth, _ = _treatments(target, family)
    if loops:
        return "loops"
    if smooth:
        return "smoothed"
    return "cusps"


def _check_variant(variant, loops, smooth):
    if variant not in ("cusps", "loops", "smoothed"):
        raise InvalidTriple("unknown variant %r" % (variant,))
    if variant == "cusps" and (loops or smooth):
        raise InvalidTriple("target needs loop or smoothing treatments")
    if variant == "loops" and loops == 0:
        raise InvalidTriple("target has no loop treatments")
    if variant == "smoothed" and smooth == 0:
        raise InvalidTriple("target has no smoothing treatments")


def _equalize_arclength(dense_xy, counts_per_piece, piece_slices):
    """Pick samples equally spaced in chart arc length inside each piece."""
    out = []
    for (a, b), m in zip(piece_slices, counts_per_piece):
        seg = dense_xy[a:b]
        chord = np.linalg.norm(np.diff(seg, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(chord)])
        targets = np.linspace(0.0, s[-1], m, endpoint=False)
        idx = np.interp(targets, s, np.arange(len(seg)))
        w = idx - np.floor(idx)
        j = np.floor(idx).astype(int)
        jn = np.minimum(j + 1, len(seg) - 1)
        out.append(seg[j] * (1.0 - w)[:, None] + seg[jn] * w[:, None])
    return np.vstack(out)


def _sphere_arclength_pick(xy_dense, piece_slices, n, tol):
    """Chart samples re-weighted so spacing is even on the sphere."""
    lifted = _lift_chart_points(xy_dense, tol).points
    pieces = []
    lens = []
    for a, b in piece_slices:
        seg = np.linalg.norm(np.diff(lifted[a:b], axis=0), axis=1)
        lens.append(seg.sum())
    lens = np.asarray(lens)
    counts = np.maximum(np.round(n * lens / lens.sum()).astype(int), 6)
    while counts.sum() != n:
        counts[int(np.argmax(counts))] += 1 if counts.sum() < n else -1
    for (a, b), m in zip(piece_slices, counts):
        seg = np.linalg.norm(np.diff(lifted[a:b], axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        targets = np.linspace(0.0, s[-1], m, endpoint=False)
        idx = np.interp(targets, s, np.arange(b - a, dtype=float))
        w = idx - np.floor(idx)
        j = np.floor(idx).astype(int) + a
        jn = np.minimum(j + 1, b - 1)
        pieces.append(xy_dense[j] * (1.0 - w)[:, None] + xy_dense[jn] * w[:, None])
    return np.vstack(pieces)


def _triquetra_chart(rho, dense=6000):
    """Three tangent circular arcs with threefold symmetry.

    Circle k has radius sqrt(3) rho around 2 rho e(30 + 120 k degrees);
    consecutive circles touch at distance rho from the origin, where the
    traversal reverses.  Each arc runs 300 degrees around the far side.
    """
    R = np.sqrt(3.0) * rho
    arcs = []
    for k in range(3):
        base = np.deg2rad(30.0 + 120.0 * k)
        c = 2.0 * rho * np.array([np.cos(base), np.sin(base)])
        t0 = np.deg2rad(240.0 + 120.0 * k)
        t1 = np.deg2rad(180.0 + 120.0 * k)
        arcs.append((c, R, t0, t1, +1.0))
    asm = ArcAssembly(arcs, junctions=("cusp", "cusp", "cusp"))
    m = dense // 3
    xy = asm.chart_points(3 * m)
    slices = [(0, m + 1), (m, 2 * m + 1), (2 * m, 3 * m)]
    return xy, slices


def _nephroid_chart(scale, dense=6000):
    """Kidney curve with two cusps on the x axis."""
    t = np.linspace(0.0, 2.0 * np.pi, dense, endpoint=False)
    x = scale * (3.0 * np.cos(t) - np.cos(3.0 * t))
    y = scale * (3.0 * np.sin(t) - np.sin(3.0 * t))
    xy = np.column_stack([x, y])
    half = dense // 2
    slices = [(0, half + 1), (half, dense)]
    return xy, slices


def _polar_h_half(n_half, dense=8000):
    """Half of the pole-to-pole symmetric base curve, in the chart.

    The radial profile r = 1 - (1 - |cos psi|) sin psi runs from the
    unit circle down through the chart origin and back; its antipodal
    completion r -> 1/r covers the other hemisphere.  Contact with the
    unit circle at the junctions is cubic, which puts one equator
    inflection at each end of the half.
    """
    psi = np.linspace(0.0, np.pi, dense, endpoint=False)
    r = 1.0 - (1.0 - np.abs(np.cos(psi))) * np.sin(psi)
    xy = r[:, None] * np.column_stack([np.cos(psi), np.sin(psi)])
    mid = dense // 2
    slices = [(0, mid + 1), (mid, dense)]
    counts = [n_half // 2, n_half - n_half // 2]
    return _equalize_arclength(xy, counts, slices)


def _mirror_changed_window(before: SampledCurve, after: SampledCurve,
                           half_period):
    """Copy a local modification to the antipodal parameter window.

    ``after`` must differ from ``before`` only on one non-wrapping
    parameter run; that run is negated and written over the samples half
    a period away, restoring exact central symmetry.
    """
    key = {float(t): i for i, t in enumerate(before.params)}
    changed = np.zeros(after.n, dtype=bool)
    for i, t in enumerate(after.params):
        j = key.get(float(t))
        if j is None or not np.array_equal(after.points[i], before.points[j]):
            changed[i] = True
    if not changed.any():
        return after
    idx = np.nonzero(changed)[0]
    if idx[0] == 0 or idx[-1] == after.n - 1:
        raise SurgeryContractViolated("treated window touches the parameter seam")
    a = after.params[idx[0] - 1]
    b = after.params[idx[-1] + 1]
    win_par = after.params[idx] + half_period
    win_pts = -after.points[idx]
    keep = ~((after.params > a + half_period) & (after.params < b + half_period))
    params = np.concatenate([after.params[keep], win_par])
    points = np.vstack([after.points[keep], win_pts])
    order = np.argsort(params)
    return SampledCurve(points=points[order], params=params[order], closed=True,
                        ambient="sphere", period=after.period)


def _cusp_points(curve, locs):
    period = curve.period
    out = []
    for loc in locs:
        d = np.abs(curve.params - loc)
        out.append(curve.points[int(np.argmin(np.minimum(d, period - d)))])
    return np.asarray(out).reshape(len(locs), 3)


def _cusp_window_radius(curve, locs, cap):
    pts = _cusp_points(curve, locs)
    if len(pts) < 2:
        return cap
    sep = min(np.linalg.norm(pts[i] - pts[j])
              for i in range(len(pts)) for j in range(i + 1, len(pts)))
    return min(0.4 * sep, cap)


def _nearest_singular_param(curve, point, tol):
    """Parameter of the cusp whose ambient position is closest to point.

    Window splices near the parameter seam rebuild the whole
    parametrization, so previously recorded cusp parameters go stale.
    Cusp positions never move, which makes them the reliable key.
    """
    S = singular_points(curve, tol)
    if not is_finite_count(S.count) or not len(S.locations):
        raise SurgeryContractViolated("lost track of the remaining cusps")
    locs = np.asarray(S.locations, dtype=float)
    pts = _cusp_points(curve, locs)
    return float(locs[int(np.argmin(np.linalg.norm(pts - point, axis=1)))])


def sharp_example(target, family, variant="cusps", n=1024,
                  tol: Tolerances = DEFAULT_TOL):
    """A spherical curve achieving its count triple exactly.

    family "eq3" realizes (D, S, I) with 2(D + S) + I = 6 and the origin
    inside the hull; "eq4" realizes (D+, S, I) with 2(D+ + S) + I = 4;
    "eq5" realizes the three centrally symmetric triples with
    2(D+ + S) + I = 6.  Starting from an all-cusp base curve, each unit
    of the first entry converts one cusp to a small loop and each pair
    of inflections smooths one cusp away; for eq5 the treatment is
    applied at one pole and mirrored through the antipodal map so the
    symmetry is exact.
    """
    if family not in _FAMILIES:
        raise InvalidTriple("unknown family %r" % (family,))
    target = tuple(int(x) for x in target)
    loops, smooth, _kept = _treatments(target, family)
    _check_variant(variant, loops, smooth)
    n = max(int(n), 512)

    if family == "eq3":
        rho = 0.6
        xy, slices = _triquetra_chart(rho)
        chart = _sphere_arclength_pick(xy, slices, n, tol)
        curve = _lift_chart_points(chart, tol)
        loop_r = 0.1 * np.sqrt(3.0) * rho
    elif family == "eq4":
        scale = 0.3
        xy, slices = _nephroid_chart(scale)
        chart = _sphere_arclength_pick(xy, slices, n, tol)
        curve = _lift_chart_points(chart, tol)
        loop_r = 0.1 * 4.0 * scale
    else:
        half = _polar_h_half(n // 2)
        lifted = _lift_chart_points(half, tol,
                                    params=np.linspace(0.0, np.pi, n // 2,
                                                       endpoint=False),
                                    period=np.pi).points
        pts = np.vstack([lifted, -lifted])
        params = np.linspace(0.0, 2.0 * np.pi, 2 * (n // 2), endpoint=False)
        curve = SampledCurve(points=pts, params=params, closed=True,
                             ambient="sphere", period=2.0 * np.pi)
        loop_r = 0.08

    S0 = singular_points(curve, tol)
    if not is_finite_count(S0.count):
        raise SurgeryContractViolated("base curve has no countable cusps")
    locs = list(np.sort(np.asarray(S0.locations, dtype=float)))
    radius = _cusp_window_radius(curve, locs, cap=0.45)

    if family == "eq5":
        # treat the cusp nearest the chart origin pole, then mirror
        half_period = 0.5 * curve.period
        d = np.abs(np.asarray(locs) - 0.5 * np.pi)
        loc = float(np.asarray(locs)[int(np.argmin(d))])
        if loops:
            treated = _loop_at_singularity(curve, loc, radius, loop_r, tol)
            curve = _mirror_changed_window(curve, treated, half_period)
        elif smooth:
            outcome = desingularize(curve, loc, radius, tol)
            curve = _mirror_changed_window(curve, outcome.result, half_period)
    else:
        treat_pts = _cusp_points(curve, locs)
        for j in range(loops + smooth):
            loc = _nearest_singular_param(curve, treat_pts[j], tol)
            if j < loops:
                curve = _loop_at_singularity(curve, loc, radius, loop_r, tol)
            else:
                curve = desingularize(curve, loc, radius, tol).result

    rep = invariant_report(curve, tol)
    if family == "eq3":
        got = (rep.D.count, rep.S.count, rep.I.count)
        ok = got == target and rep.hull_status == "interior"
    elif family == "eq4":
        got = (rep.D_plus.count, rep.S.count, rep.I.count)
        ok = got == target
    else:
        got = (rep.D_plus.count, rep.S.count, rep.I.count)
        sym = float(np.max(np.linalg.norm(
            curve.points + np.roll(curve.points, -curve.n // 2, axis=0), axis=1)))
        ok = got == target and sym <= tol.eps_match * 2.0
    if not ok:
        raise SurgeryContractViolated(
            "constructed %s curve measured %r, wanted %r" % (family, got, target))
    return curve


# ---------------------------------------------------------------------------
# random corpora


_CONSTRAINT_NAMES = ("simple", "bisecting", "symmetric", "hull_interior")


def _normalize_constraints(constraints):
    if constraints is None:
        return frozenset()
    if isinstance(constraints, dict):
        wanted = {k for k, v in constraints.items() if v}
    else:
        wanted = set(constraints)
    bad = wanted - set(_CONSTRAINT_NAMES)
    if bad:
        raise ValueError("unknown constraints: %s" % ", ".join(sorted(bad)))
    return frozenset(wanted)


def _draw_loop(rng, degree, ambient, symmetric):
    dim = 2 if ambient == "plane" else 3
    cos = np.zeros((degree + 1, dim))
    sin = np.zeros((degree + 1, dim))
    for k in range(1, degree + 1):
        if symmetric and k % 2 == 0:
            continue
        cos[k] = rng.normal(0.0, 1.0 / k**2, dim)
        sin[k] = rng.normal(0.0, 1.0 / k**2, dim)
    if not symmetric:
        cos[0] = rng.normal(0.0, 0.35, dim)
    return cos, sin


def _loop_curve_or_none(cos, sin, ambient, seed, n, tol):
    loop = FourierLoop(cos, sin, ambient=ambient, seed=seed)
    if ambient == "sphere":
        t = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        raw = loop._raw(t, 0)
        norms = np.linalg.norm(raw, axis=1)
        if norms.min() < 0.2 * norms.max():
            return None
    try:
        return loop.curve(n, tol)
    except DegenerateCurve:
        return None


def _shift_to_bisecting(cos, sin, ambient, seed, n, tol):
    """Search a vertical shift of the raw loop that halves the area."""
    def area_gap(c):
        cc = cos.copy()
        cc[0, 2] += c
        curve = _loop_curve_or_none(cc, sin, ambient, seed, n, tol)
        if curve is None:
            return None, None
        try:
            res = incidence.enclosed_area(curve, tol)
        except NotSimple:
            return None, None
        return res.left - 2.0 * np.pi, curve

    grid = np.linspace(-0.85, 0.85, 18)
    vals = []
    for c in grid:
        g, curve = area_gap(c)
        vals.append(g)
        if g is not None and abs(g) < tol.bisect_tol:
            return curve
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] is None or vals[i + 1] is None:
            continue
        if vals[i] * vals[i + 1] < 0:
            bracket = (grid[i], grid[i + 1], vals[i])
            break
    if bracket is None:
        return None
    lo, hi, flo = bracket
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        g, curve = area_gap(mid)
        if g is None:
            return None
        if abs(g) < tol.bisect_tol:
            return curve
        if g * flo < 0:
            hi = mid
        else:
            lo, flo = mid, g
    return None


def random_fourier_loop(seed, degree, ambient="sphere", constraints=None,
                        n=512, max_tries=60, tol: Tolerances = DEFAULT_TOL):
    """Seeded random trigonometric loop meeting the requested constraints.

    Draws coefficient sets from a per-attempt child of ``seed`` and
    rejects until all constraints hold: "simple" (no self-intersection),
    "symmetric" (only odd frequencies, so the curve equals its own
    antipodal image), "hull_interior" (origin strictly inside the sample
    hull), "bisecting" (spherical area split 2 pi / 2 pi, reached by a
    vertical shift search when the draw itself does not bisect).
    Symmetric curves bisect by construction, so the two constraints
    combine without a shift.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    wanted = _normalize_constraints(constraints)
    if "bisecting" in wanted and ambient != "sphere":
        raise ValueError("bisecting only makes sense on the sphere")
    symmetric = "symmetric" in wanted

    for attempt in range(max_tries):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), attempt]))
        cos, sin = _draw_loop(rng, degree, ambient, symmetric)
        curve = _loop_curve_or_none(cos, sin, ambient, seed, n, tol)
        if curve is None:
            continue
        if "bisecting" in wanted and not symmetric:
            try:
                already = incidence.enclosed_area(curve, tol).bisects
            except NotSimple:
                continue
            if not already:
                curve = _shift_to_bisecting(cos, sin, ambient, seed, n, tol)
                if curve is None:
                    continue
        if not _constraints_hold(curve, wanted, tol):
            continue
        return curve
    raise ConstraintUnsatisfiable(
        "no loop met %s within %d attempts"
        % (sorted(wanted) or "regularity", max_tries))


def _constraints_hold(curve, wanted, tol):
    if "simple" in wanted or "bisecting" in wanted:
        coincident, _ = incidence.coincidence_pairs(curve, tol)
        if coincident.count != 0:
            return False
    if "symmetric" in wanted:
        gap = np.max(np.linalg.norm(
            curve.points + np.roll(curve.points, -curve.n // 2, axis=0), axis=1))
        scale = float(np.max(np.linalg.norm(curve.points, axis=1)))
        if gap > tol.eps_match * max(scale, 1.0) * 4.0:
            return False
    if "hull_interior" in wanted:
        if curve.ambient != "sphere":
            return False
        if incidence.origin_in_hull(curve.points, tol).status != "interior":
            return False
    if "bisecting" in wanted:
        try:
            if not incidence.enclosed_area(curve, tol).bisects:
                return False
        except NotSimple:
            return False
    return True

"""Local surgeries on sampled curves.

Cusp removal, corner rounding and double point resolution share one
pattern: cut a window around the feature, rebuild its interior from graph
or polyline primitives in a planar chart, splice the window back so every
sample outside it is untouched, then verify the advertised count contract
on the result.  A construction that fails its own verification retries
over a deterministic parameter sweep before raising.

The combined count 2 * (coincident double points + singular points) +
inflections never increases under any surgery here; each public operation
checks that on its output and refuses to return a curve that would break
it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    AmbiguousClassification,
    ClassificationFailed,
    DegenerateField,
    DisconnectedResult,
    MultipleSingularity,
    NotDouble,
    NotInHemisphere,
    PreconditionViolated,
    SurgeryContractViolated,
)
from .geom import DEFAULT_TOL, SampledCurve, ScalarField, Tolerances
from .geom import _frame
from .invariants import (
    count_sign_changes,
    count_zero_clusters,
    invariant_report,
    is_finite_count,
    singular_points,
)

CONVEX = "convex"
CONCAVE = "concave"
SEMICONVEX = "semiconvex"
UNKNOWN = "unknown"

_INFLECTION_BUDGET = {CONVEX: 0, SEMICONVEX: 1, CONCAVE: 2}


# ---------------------------------------------------------------------------
# data types


@dataclass
class GraphArc:
    """A function graph y = f(x) sampled on a strictly increasing grid.

    ``tags`` records regularity claims for the arc ("C2" by default); a
    tag such as "C1" or "cusp" marks an arc that is a graph but not twice
    differentiable somewhere inside.
    """

    x: np.ndarray
    y: np.ndarray
    tags: Tuple[str, ...] = ("C2",)

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=float)
        self.y = np.ascontiguousarray(self.y, dtype=float)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if len(self.x) < 4:
            raise ValueError("a graph arc needs at least 4 samples")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("x must be strictly increasing")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("graph arc samples must be finite")
        self._spl = None

    @property
    def domain(self):
        return float(self.x[0]), float(self.x[-1])

    def spline(self):
        if self._spl is None:
            self._spl = CubicSpline(self.x, self.y)
        return self._spl

    def __call__(self, xq):
        return self.spline()(xq)

    def derivative(self, xq, k=1):
        return self.spline()(xq, k)


@dataclass
class DoubleSpiral:
    """Two polyline arms meeting at a vortex inside a ball.

    Arms are stored vortex-first: ``arm1[0]`` and ``arm2[0]`` both sit at
    (or next to) the vortex and the arms run outward from there.
    """

    arm1: np.ndarray
    arm2: np.ndarray
    vortex: np.ndarray
    radius: float
    classification: str = UNKNOWN

    def __post_init__(self):
        self.arm1 = np.ascontiguousarray(self.arm1, dtype=float)
        self.arm2 = np.ascontiguousarray(self.arm2, dtype=float)
        self.vortex = np.ascontiguousarray(self.vortex, dtype=float)


@dataclass
class SurgeryOutcome:
    """Result of one surgery together with its count accounting."""

    result: SampledCurve
    inflections_added: int
    sigma_plus_before: int
    sigma_plus_after: int
    classification: Optional[str] = None


# ---------------------------------------------------------------------------
# scalar-graph primitives


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _plateau(x, inner, outer):
    """1 on |x| <= inner, 0 on |x| >= outer, quintic ramp between."""
    ax = np.abs(np.asarray(x, dtype=float))
    return _smoothstep((outer - ax) / max(outer - inner, 1e-300))


def _bump_kernel(halfwidth_samples):
    """Discrete compactly supported kernel (1 - u^2)^3, normalized."""
    hw = int(halfwidth_samples)
    u = np.arange(-hw, hw + 1) / float(hw + 1)
    k = (1.0 - u * u) ** 3
    return k / k.sum()


def _convolve_padded(values, kernel, periodic):
    hw = (len(kernel) - 1) // 2
    if hw == 0:
        return values.copy()
    if periodic:
        v = np.concatenate([values[-hw:], values, values[:hw]])
    else:
        # odd reflection keeps end slopes, so an open arc is not dragged
        # toward its boundary values
        left = 2.0 * values[0] - values[1 : hw + 1][::-1]
        right = 2.0 * values[-1] - values[-hw - 1 : -1][::-1]
        v = np.concatenate([left, values, right])
    return np.convolve(v, kernel, mode="valid")


def _zero_runs(inband, cyclic):
    """Runs of consecutive True values, as (start, stop) inclusive pairs."""
    n = len(inband)
    idx = np.nonzero(inband)[0]
    if len(idx) == 0:
        return []
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    stops = np.concatenate([idx[breaks], [idx[-1]]])
    runs = list(zip(starts.tolist(), stops.tolist()))
    if cyclic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        s0, e0 = runs.pop(0)
        s1, e1 = runs.pop()
        runs.append((s1, e0 + n))
    return runs


def mollify_zero_preserving(f: ScalarField, eps=1e-2, tol: Tolerances = DEFAULT_TOL):
    """Smooth a scalar field without creating new zeros.

    Each zero cluster is first bridged by a straight segment between the
    flanking out-of-band values, then the whole field is convolved with a
    narrow polynomial bump.  The output stays within ``eps`` of the input
    in the sup norm and its sign-change and zero-cluster counts do not
    exceed the input's.  Raises DegenerateField when the field is zero on
    too large a fraction of its domain for the bands to mean anything, or
    when no kernel width meets the ``eps`` budget.
    """
    v = f.values.astype(float)
    n = len(v)
    if n < 8:
        raise DegenerateField("field too short to mollify")
    band = f.band(tol.eps_zero)
    if band == 0.0:
        raise DegenerateField("identically zero field")
    inband = np.abs(v) <= band
    if inband.mean() > tol.degenerate_fraction:
        raise DegenerateField("zero set covers too much of the domain")

    before_changes = count_sign_changes(f, tol)
    before_clusters = count_zero_clusters(f, tol)
    if not (is_finite_count(before_changes.count) and is_finite_count(before_clusters.count)):
        raise DegenerateField("input counts are already degenerate")

    runs = _zero_runs(inband, f.closed)
    margin = 2
    bridged = v.copy()
    for s, e in runs:
        lo = s - margin
        hi = e + margin
        i0 = lo - 1
        i1 = hi + 1
        if not f.closed:
            i0 = max(i0, 0)
            i1 = min(i1, n - 1)
            lo = max(lo, i0 + 1)
            hi = min(hi, i1 - 1)
            if hi < lo:
                continue
        a = v[i0 % n]
        b = v[i1 % n]
        m = hi - lo + 1
        w = (np.arange(1, m + 1)) / float(m + 1)
        vals = a + (b - a) * w
        bridged[np.arange(lo, hi + 1) % n] = vals

    gaps = []
    if len(runs) >= 2:
        for k in range(len(runs)):
            s_next = runs[(k + 1) % len(runs)][0] + (n if f.closed and k == len(runs) - 1 else 0)
            gaps.append(s_next - runs[k][1])
        min_gap = max(min(gaps), 2)
    else:
        min_gap = n // 4
    hw0 = max(min(min_gap // 3, n // 8), 1)

    hw = hw0
    last = None
    while hw >= 1:
        out = _convolve_padded(bridged, _bump_kernel(hw), f.closed) if hw >= 1 else bridged
        dev = float(np.max(np.abs(out - v)))
        g = ScalarField(
            values=out, params=f.params.copy(), closed=f.closed,
            period=f.period, name=f.name, scale=f.scale,
        )
        ca = count_sign_changes(g, tol)
        cb = count_zero_clusters(g, tol)
        ok_counts = (
            is_finite_count(ca.count) and ca.count <= before_changes.count
            and is_finite_count(cb.count) and cb.count <= before_clusters.count
        )
        if dev <= eps and ok_counts:
            return g
        last = (dev, ok_counts)
        hw //= 2
    raise DegenerateField(
        "no kernel width met the deviation budget (last dev %.3g, counts ok: %s)" % last
    )


def bump_perturb(arc: GraphArc, delta, tol: Tolerances = DEFAULT_TOL):
    """Add a compactly supported plateau bump to a graph arc.

    The bump equals ``delta`` on the middle quarter of the (symmetric)
    domain and vanishes outside the middle half, so the arc is unchanged
    near its endpoints.  Requires the second derivative to be bounded away
    from zero off the center; refuses a ``delta`` large enough to change
    the second-derivative zero count.
    """
    a0, b0 = arc.domain
    if not (a0 < 0.0 < b0):
        raise PreconditionViolated("bump domain must straddle x = 0")
    a = min(-a0, b0)
    xg = np.linspace(-a, a, 1201)
    f2 = arc.derivative(xg, 2)
    core = np.abs(xg) < a / 16.0
    scale2 = float(np.max(np.abs(f2)))
    if scale2 == 0.0:
        raise PreconditionViolated("flat arc has no curvature budget")
    if np.min(np.abs(f2[~core])) <= tol.eps_zero * scale2:
        raise PreconditionViolated("second derivative vanishes away from the center")

    def zero_count(vals):
        g = ScalarField(values=vals, params=xg.copy(), closed=False, scale=scale2)
        c = count_zero_clusters(g, tol)
        return c.count if is_finite_count(c.count) else np.inf

    before = zero_count(f2)
    phi2 = _second_derivative_samples(lambda t: _plateau(t, a / 4.0, a / 2.0), xg)
    after = zero_count(f2 + float(delta) * phi2)
    if after > before:
        raise PreconditionViolated("perturbation would add second-derivative zeros")
    bump = float(delta) * _plateau(arc.x, a / 4.0, a / 2.0)
    return GraphArc(arc.x.copy(), arc.y + bump, arc.tags)


def _second_derivative_samples(fun, xg):
    h = xg[1] - xg[0]
    v = fun(xg)
    out = np.zeros_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    out[0] = out[1]
    out[-1] = out[-2]
    return out


# ---------------------------------------------------------------------------
# polyline helpers


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _perp(v):
    return np.array([-v[1], v[0]])


def _nearest_on_poly(q, poly):
    """Distance, segment index, segment fraction, foot and side of q."""
    a = poly[:-1]
    b = poly[1:]
    ab = b - a
    denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    t = np.clip(np.einsum("ij,ij->i", q - a, ab) / denom, 0.0, 1.0)
    foot = a + t[:, None] * ab
    d = np.linalg.norm(q - foot, axis=1)
    i = int(np.argmin(d))
    side = np.sign(_cross2(ab[i], q - foot[i]))
    return float(d[i]), i, float(t[i]), foot[i], side


class _ArmPath:
    """Arc-length interpolation along a polyline arm."""

    def __init__(self, pts):
        pts = np.asarray(pts, dtype=float)
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 1e-14
        self.pts = pts[keep]
        seg = np.linalg.norm(np.diff(self.pts, axis=0), axis=1)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.L = float(self.cum[-1])
        e = np.diff(self.pts, axis=0)
        e = e / np.linalg.norm(e, axis=1, keepdims=True)
        vt = np.empty_like(self.pts)
        vt[0] = e[0]
        vt[-1] = e[-1]
        if len(e) > 1:
            m = e[:-1] + e[1:]
            nm = np.linalg.norm(m, axis=1, keepdims=True)
            vt[1:-1] = np.where(nm > 1e-12, m / np.maximum(nm, 1e-300), e[:-1])
        self.vtan = vt

    def point(self, s):
        s = float(np.clip(s, 0.0, self.L))
        j = int(np.searchsorted(self.cum, s, side="right") - 1)
        j = min(max(j, 0), len(self.pts) - 2)
        w = (s - self.cum[j]) / max(self.cum[j + 1] - self.cum[j], 1e-300)
        return (1.0 - w) * self.pts[j] + w * self.pts[j + 1]

    def tangent(self, s):
        s = float(np.clip(s, 0.0, self.L))
        j = int(np.searchsorted(self.cum, s, side="right") - 1)
        j = min(max(j, 0), len(self.pts) - 2)
        w = (s - self.cum[j]) / max(self.cum[j + 1] - self.cum[j], 1e-300)
        t = (1.0 - w) * self.vtan[j] + w * self.vtan[j + 1]
        nt = np.linalg.norm(t)
        return t / max(nt, 1e-300)

    def frac_index(self, s):
        """Fractional sample index of arclength position s."""
        s = float(np.clip(s, 0.0, self.L))
        j = int(np.searchsorted(self.cum, s, side="right") - 1)
        j = min(max(j, 0), len(self.pts) - 2)
        w = (s - self.cum[j]) / max(self.cum[j + 1] - self.cum[j], 1e-300)
        return j + w


def _bisect(fun, lo, hi, flo, iters=60):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm <= 0.0) == (flo <= 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _arc_points(c, r, A, B, sense, spacing):
    ta = np.arctan2(A[1] - c[1], A[0] - c[0])
    tb = np.arctan2(B[1] - c[1], B[0] - c[0])
    span = (sense * (tb - ta)) % (2.0 * np.pi)
    if span < 1e-9:
        span = 2.0 * np.pi
    m = max(int(np.ceil(span * r / max(spacing, 1e-12))) + 2, 8)
    th = ta + sense * np.linspace(0.0, span, m)
    return c + r * np.column_stack([np.cos(th), np.sin(th)])


def _segment_points(A, B, spacing):
    d = float(np.linalg.norm(B - A))
    m = max(int(np.ceil(d / max(spacing, 1e-12))) + 1, 2)
    w = np.linspace(0.0, 1.0, m)[:, None]
    return A * (1.0 - w) + B * w


# ---------------------------------------------------------------------------
# classification


def classify_double_spiral(ds: DoubleSpiral, tol: Tolerances = DEFAULT_TOL):
    """Classify a vortex as convex, concave or semiconvex.

    The two arms are concatenated into one path through the vortex.  When
    the principal normal points to the same side of that path on both
    arms, the vortex is convex or concave according to whether that side
    contains no line segment through the vortex (checked by a swept fan of
    directions, refined by bisection); when the normal side flips between
    the arms the vortex is semiconvex.
    """
    a1 = np.asarray(ds.arm1, dtype=float)
    a2 = np.asarray(ds.arm2, dtype=float)
    if len(a1) < 5 or len(a2) < 5:
        raise AmbiguousClassification("arms too short to classify")
    o = ds.vortex
    R = float(ds.radius)
    path = np.vstack([a1[::-1], a2[1:]])
    iv = len(a1) - 1

    e = np.diff(path, axis=0)
    el = np.linalg.norm(e, axis=1)
    good = el > 1e-14
    turn = np.zeros(len(path))
    for j in range(1, len(path) - 1):
        if good[j - 1] and good[j]:
            turn[j] = np.arctan2(
                _cross2(e[j - 1], e[j]), float(np.dot(e[j - 1], e[j]))
            )
    med = float(np.median(el[good])) if good.any() else 0.0
    dv = np.linalg.norm(path - o, axis=1)
    excl = dv < max(0.12 * R, 3.0 * med)
    tband = tol.eps_zero * max(float(np.max(np.abs(turn))), 1e-300)

    def arm_sign(js):
        vals = np.array([turn[j] for j in js if not excl[j] and abs(turn[j]) > tband])
        if len(vals) < 3:
            raise AmbiguousClassification("not enough curvature signal on an arm")
        pos = np.mean(vals > 0)
        if pos >= 0.9:
            return 1
        if pos <= 0.1:
            return -1
        raise AmbiguousClassification("arm curvature sign is not consistent")

    s1 = arm_sign(range(1, iv))
    s2 = arm_sign(range(iv + 1, len(path) - 1))
    if s1 != s2:
        ds.classification = SEMICONVEX
        return SEMICONVEX

    sigma = s1
    clear = 2.0 * med

    def in_side(q):
        if np.linalg.norm(q - o) > 0.9 * R:
            return False
        d, i, t, foot, side = _nearest_on_poly(q, path)
        return d > clear and side == sigma

    radii = np.linspace(max(0.15 * R, 4.0 * med), 0.8 * R, 20)

    def direction_hit(theta):
        u = np.array([np.cos(theta), np.sin(theta)])
        for s in radii:
            if not in_side(o + s * u):
                return False
            if not in_side(o - s * u):
                return False
        return True

    def direction_frac(theta):
        u = np.array([np.cos(theta), np.sin(theta)])
        tot = 0
        for s in radii:
            tot += int(in_side(o + s * u)) + int(in_side(o - s * u))
        return tot / (2.0 * len(radii))

    thetas = np.linspace(0.0, np.pi, 64, endpoint=False)
    fracs = np.array([direction_frac(t) for t in thetas])
    if np.any(fracs >= 1.0):
        ds.classification = CONCAVE
        return CONCAVE
    # refine around the most promising directions before giving up
    for j in np.argsort(fracs)[-4:]:
        lo = thetas[j] - np.pi / 64
        hi = thetas[j] + np.pi / 64
        for t in np.linspace(lo, hi, 9):
            if direction_hit(t):
                ds.classification = CONCAVE
                return CONCAVE
    ds.classification = CONVEX
    return CONVEX


# ---------------------------------------------------------------------------
# chart plumbing


def _to_chart(points, pole):
    e1, e2, u = _frame(pole)
    c = points @ u
    if np.any(c <= 1e-9):
        raise NotInHemisphere("window leaves the hemisphere of its own center")
    w = points / c[:, None]
    return np.column_stack([w @ e1, w @ e2])


def _from_chart(xy, pole):
    e1, e2, u = _frame(pole)
    v = xy[:, 0, None] * e1 + xy[:, 1, None] * e2 + u
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _dedupe(pts, eps=1e-13):
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > eps
    return pts[keep]


def _smooth_near(pts, centers, half=3, passes=2, closed=True):
    """Light local averaging around junction indices (in place copy)."""
    out = pts.copy()
    n = len(out)
    idx = set()
    for c in centers:
        for j in range(c - half, c + half + 1):
            idx.add(j % n if closed else min(max(j, 1), n - 2))
    idx = sorted(idx)
    for _ in range(passes):
        prev = out.copy()
        for j in idx:
            if not closed and (j <= 0 or j >= n - 1):
                continue
            out[j] = 0.25 * prev[(j - 1) % n] + 0.5 * prev[j] + 0.25 * prev[(j + 1) % n]
    return out


def _window_run(points, idx0, radius):
    """Contiguous cyclic sample run around idx0 within ``radius`` of it."""
    n = len(points)
    d = np.linalg.norm(points - points[idx0], axis=1)
    mask = d < radius
    if mask.all():
        raise PreconditionViolated("neighborhood radius swallows the whole curve")
    runs = _zero_runs(mask, cyclic=True)
    home = None
    for s, e in runs:
        if s <= idx0 <= e or s <= idx0 + n <= e:
            home = (s, e)
            break
    if home is None:
        raise PreconditionViolated("no samples inside the neighborhood")
    return home[0], home[1], len(runs) > 1


def _splice_window(curve, lo, hi, win_pts):
    """Replace cyclic sample range lo..hi (inclusive) with ``win_pts``.

    Exterior points are preserved bit for bit.  When the window wraps the
    parameter seam the whole curve is rotated first and the parameters are
    rebuilt by chord length; otherwise exterior parameters are kept.
    """
    pts = curve.points
    n = len(pts)
    win_pts = _dedupe(np.asarray(win_pts, dtype=float))
    wrapped = hi >= n or lo < 3 or hi > n - 4
    if wrapped:
        shift = (lo - 3) % n
        pts = np.roll(pts, -shift, axis=0)
        lo -= shift
        hi -= shift
        if lo < 0:
            lo += n
            hi += n
        new_pts = np.vstack([pts[:lo], win_pts, pts[hi + 1 :]])
        seg = np.linalg.norm(np.diff(new_pts, axis=0), axis=1)
        closing = np.linalg.norm(new_pts[0] - new_pts[-1])
        total = float(seg.sum() + closing)
        params = np.concatenate([[0.0], np.cumsum(seg)]) * (curve.period / total)
        return SampledCurve(
            points=new_pts, params=params, closed=True,
            ambient=curve.ambient, period=curve.period,
        )
    new_pts = np.vstack([pts[:lo], win_pts, pts[hi + 1 :]])
    p_prev = curve.params[lo - 1]
    p_next = curve.params[hi + 1]
    chain = np.vstack([pts[lo - 1][None], win_pts, pts[hi + 1][None]])
    seg = np.linalg.norm(np.diff(chain, axis=0), axis=1)
    cum = np.cumsum(seg)
    inner = p_prev + (cum[:-1] / max(cum[-1], 1e-300)) * (p_next - p_prev)
    params = np.concatenate([curve.params[:lo], inner, curve.params[hi + 1 :]])
    return SampledCurve(
        points=new_pts, params=params, closed=True,
        ambient=curve.ambient, period=curve.period,
    )


# ---------------------------------------------------------------------------
# vortex constructions (in a planar chart)


def _fillet(arm_a, arm_b, r, spacing):
    """Circle of radius r tangent to both arms, for a side-sharing vortex.

    Returns (s_a, s_b, arc) where s_a, s_b are arclength cut positions on
    the arms and arc runs from the tangency on arm_a to the one on arm_b.
    None when no tangency bracket exists at this radius.
    """
    pa = _ArmPath(arm_a)
    pb = _ArmPath(arm_b)
    if pa.L < 4 * r or pb.L < 2.5 * r:
        return None
    ref = pb.point(min(pb.L * 0.4, max(3.0 * spacing, 0.3 * pb.L)))

    def center(s):
        p = pa.point(s)
        t = pa.tangent(s)
        nrm = _perp(t)
        if np.dot(nrm, ref - p) < 0:
            nrm = -nrm
        return p + r * nrm

    def g(s):
        return _nearest_on_poly(center(s), pb.pts)[0] - r

    grid = np.linspace(0.0, 0.95 * pa.L, 48)
    vals = [g(s) for s in grid]
    bracket = None
    for j in range(len(grid) - 1):
        if vals[j] <= 0.0 < vals[j + 1]:
            bracket = (grid[j], grid[j + 1], vals[j])
            break
    if bracket is None:
        return None
    sa = _bisect(g, bracket[0], bracket[1], bracket[2])
    c = center(sa)
    A = pa.point(sa)
    d, i, t, foot, _ = _nearest_on_poly(c, pb.pts)
    B = foot
    sb = float(pb.cum[i] + t * (pb.cum[i + 1] - pb.cum[i]))
    if sb < 1.2 * spacing:
        return None
    d_in = -pa.tangent(sa)
    sense = np.sign(_cross2(A - c, d_in)) or 1.0
    arc = _arc_points(c, r, A, B, sense, spacing)
    out_dir = sense * _perp((B - c) / max(np.linalg.norm(B - c), 1e-300))
    if np.dot(out_dir, pb.tangent(sb)) < 0.2:
        return None
    return sa, sb, arc


def _assemble_window(win, iv, sa, sb, mid):
    """Window polyline with the vortex gap replaced by ``mid``.

    ``sa``/``sb`` are arclength cuts on the vortex-first arms; arm sample
    j corresponds to window index iv - j (entering) or iv + j (exiting).
    """
    pa = _ArmPath(win[: iv + 1][::-1])
    pb = _ArmPath(win[iv:])
    ja = int(np.ceil(pa.frac_index(sa) - 1e-9))
    jb = int(np.ceil(pb.frac_index(sb) - 1e-9))
    head = win[: iv - ja + 1]
    tail = win[iv + jb :]
    out = _dedupe(np.vstack([head, mid, tail]))
    j1 = min(len(head), len(out) - 1)
    j2 = min(len(head) + len(mid), len(out) - 1)
    return out, (j1, j2)


def _graph_bridge(win, iv, spacing, tol):
    """Replace a two-sided vortex with a cubic that has one inflection.

    The window must be a graph over the common tangent line through the
    vortex.  A cubic through the vortex is chosen by halving sweep so it
    enters below the graph on one side and above on the other; the graph
    follows the cubic between the outermost crossings, with the two
    junction kinks mollified away.  Returns the new window or None.
    """
    m = len(win)
    lo = max(iv - 5, 0)
    hi = min(iv + 5, m - 1)
    d = win[hi] - win[lo]
    th = np.arctan2(d[1], d[0])
    R = np.array([[np.cos(-th), -np.sin(-th)], [np.sin(-th), np.cos(-th)]])
    W = (win - win[iv]) @ R.T
    x = W[:, 0]
    y = W[:, 1]
    if np.any(np.diff(x) <= 0):
        return None
    spl = CubicSpline(x, y)
    a = float(x[2])
    b = float(x[-3])
    if not (a < 0.0 < b):
        return None
    w = 0.8 * min(-a, b)
    tau = np.sign(spl(0.9 * b) - spl(0.9 * a)) or 1.0
    xg = np.linspace(a, b, 1601)
    h = xg[1] - xg[0]
    fg = spl(xg)
    for k in range(2, 40):
        lam = 2.0 ** (-k)
        gg = tau * lam * (xg ** 3 / (w * w) + xg)
        if not (tau * (spl(b) - tau * lam * (b ** 3 / (w * w) + b)) > 0.0):
            continue
        if not (tau * (tau * lam * (a ** 3 / (w * w) + a) - spl(a)) > 0.0):
            continue
        diff = fg - gg
        sgn = np.sign(diff)
        flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
        if len(flips) < 2:
            continue
        neg = [j for j in flips if xg[j] < -w / 200]
        pos = [j for j in flips if xg[j] > w / 200]
        if not neg or not pos:
            continue
        j1 = neg[0]
        j2 = pos[-1]
        x1, x2 = xg[j1], xg[j2 + 1]
        bridged = np.where((xg >= x1) & (xg <= x2), gg, fg)
        hm = min(x1 - a, -x1, x2, b - x2) / 3.0
        hw = max(int(hm / h), 2)
        sm = _convolve_padded(bridged, _bump_kernel(hw), periodic=False)
        f2 = np.zeros_like(sm)
        f2[1:-1] = (sm[2:] - 2.0 * sm[1:-1] + sm[:-2]) / (h * h)
        f2[0], f2[-1] = f2[1], f2[-2]
        fld = ScalarField(values=f2, params=xg.copy(), closed=False,
                          scale=float(np.max(np.abs(f2))))
        cnt = count_sign_changes(fld, tol)
        if not (is_finite_count(cnt.count) and cnt.count <= 1):
            continue
        margin = 3.0 * hw * h
        i1 = int(np.searchsorted(x, x1 - margin) - 1)
        i2 = int(np.searchsorted(x, x2 + margin))
        if i1 < 1 or i2 > m - 2:
            continue
        inside = (xg > x[i1]) & (xg < x[i2])
        step = max(int(spacing / h), 1)
        sel = np.nonzero(inside)[0][::step]
        mid = np.column_stack([xg[sel], sm[sel]])
        new_w = np.vstack([W[: i1 + 1], mid, W[i2:]])
        return _dedupe(new_w @ R + win[iv]), None
    return None


# ---------------------------------------------------------------------------
# count accounting


def _finite_or_raise(value, what, exc=SurgeryContractViolated):
    if not is_finite_count(value):
        raise exc("%s is not a finite count" % what)
    return int(value)


def _report_counts(curve, tol, exc=SurgeryContractViolated):
    rep = invariant_report(curve, tol)
    I = _finite_or_raise(rep.I.count, "inflection count", exc)
    sp = _finite_or_raise(rep.sigma_plus, "combined count", exc)
    S = _finite_or_raise(rep.S.count, "singular count", exc)
    Dp = _finite_or_raise(rep.D_plus.count, "double point count", exc)
    return rep, I, S, Dp, sp


# ---------------------------------------------------------------------------
# desingularization


def desingularize(curve: SampledCurve, p, radius, tol: Tolerances = DEFAULT_TOL):
    """Remove the singular point of ``curve`` at parameter ``p``.

    The neighborhood is classified as a convex, concave or semiconvex
    vortex and rebuilt accordingly; every construction is a bitangent
    circle or graph bridge whose wrap sense is forced by tangency, so a
    convex vortex costs no new inflections, a semiconvex one at most one
    and a concave one at most two (a dimple).  Samples outside the
    neighborhood are untouched, no self-intersection is created, and the
    combined count 2(D+ + S) + I never increases.
    """
    n = curve.n
    S0 = singular_points(curve, tol)
    period = curve.period

    def nearest_idx(t):
        d = np.abs(curve.params - t)
        return int(np.argmin(np.minimum(d, period - d)))

    vortex_param = None
    if is_finite_count(S0.count) and S0.count > 0:
        d = np.abs(S0.locations - p) % period
        d = np.minimum(d, period - d)
        k = int(np.argmin(d))
        if d[k] <= 0.1 * period:
            vortex_param = float(S0.locations[k])
    if vortex_param is None:
        idx_p = nearest_idx(p)
        if not _has_curvature_spike(curve, idx_p, radius):
            raise PreconditionViolated("no singular point near the requested parameter")
        vortex_param = float(curve.params[idx_p])

    idx0 = nearest_idx(vortex_param)
    lo, hi, extra = _window_run(curve.points, idx0, radius)
    if extra:
        raise MultipleSingularity("another strand passes through the neighborhood")
    if is_finite_count(S0.count):
        width = tol.cluster_width(curve.params, period)
        for loc in S0.locations:
            sep = abs(loc - vortex_param) % period
            sep = min(sep, period - sep)
            if sep <= 3.0 * width:
                continue
            j = nearest_idx(loc)
            jj = j if j >= lo else j + n
            if lo <= jj <= hi:
                raise MultipleSingularity("two singular points share the neighborhood")

    rep_b, I_b, S_b, Dp_b, sp_b = _report_counts(curve, tol, PreconditionViolated)

    idxs = np.arange(lo, hi + 1) % n
    raw = curve.points[idxs]
    q0 = curve.points[idx0]
    if curve.ambient == "sphere":
        win = _to_chart(raw, q0)
    else:
        win = raw - q0
    iv = int(np.nonzero(idxs == idx0)[0][0])
    if iv < 4 or len(win) - iv < 5:
        raise PreconditionViolated("singular point too close to the window edge")

    chart_R = float(np.max(np.linalg.norm(win - win[iv], axis=1)))
    spacing = float(np.median(np.linalg.norm(np.diff(win, axis=0), axis=1)))
    ds = DoubleSpiral(
        arm1=win[: iv + 1][::-1], arm2=win[iv:], vortex=win[iv],
        radius=chart_R,
    )
    cls = classify_double_spiral(ds, tol)
    budget = _INFLECTION_BUDGET[cls]

    built_any = False
    for new_win, junctions in _vortex_candidates(ds, win, iv, cls, chart_R, spacing, tol):
        built_any = True
        if junctions:
            new_win = _smooth_near(new_win, junctions, half=3, passes=2, closed=False)
        if curve.ambient == "sphere":
            back = _from_chart(new_win, q0)
        else:
            back = new_win + q0
        out = _splice_window(curve, lo, hi, back)
        S_a = singular_points(out, tol)
        if not is_finite_count(S_a.count):
            continue
        if S_a.count > 0 and _singular_inside(out, S_a, q0, radius):
            continue
        try:
            rep_a, I_a, S_cnt_a, Dp_a, sp_a = _report_counts(out, tol)
        except SurgeryContractViolated:
            continue
        added = I_a - I_b
        if added > budget or sp_a > sp_b:
            continue
        if Dp_a != Dp_b:
            continue
        if is_finite_count(rep_b.D.count) and rep_a.D.count != rep_b.D.count:
            continue
        return SurgeryOutcome(
            result=out, inflections_added=added,
            sigma_plus_before=sp_b, sigma_plus_after=sp_a,
            classification=cls,
        )
    if not built_any:
        raise ClassificationFailed("no %s construction fit the neighborhood" % cls)
    raise SurgeryContractViolated("every candidate violated the count contract")


def _singular_inside(out, S_a, q0, radius):
    for loc in S_a.locations:
        j = int(np.argmin(np.minimum(
            np.abs(out.params - loc), out.period - np.abs(out.params - loc))))
        if np.linalg.norm(out.points[j] - q0) < 1.2 * radius:
            return True
    return False


def _has_curvature_spike(curve, idx, radius):
    pts = curve.points
    n = len(pts)
    js = np.arange(idx - 12, idx + 13) % n
    seg = np.diff(pts[js], axis=0)
    sl = np.linalg.norm(seg, axis=1)
    good = sl > 1e-14
    if good.sum() < 4:
        return True
    turns = []
    for j in range(len(seg) - 1):
        if good[j] and good[j + 1]:
            c = np.dot(seg[j], seg[j + 1]) / (sl[j] * sl[j + 1])
            turns.append(np.arccos(np.clip(c, -1.0, 1.0)))
    turns = np.asarray(turns)
    if len(turns) == 0:
        return False
    peak = turns.max()
    floor = np.median(turns) + 1e-12
    return peak > max(8.0 * floor, 0.3)


def _vortex_candidates(ds, win, iv, cls, chart_R, spacing, tol):
    """Yield (new_window, junction_indices) candidates for one vortex."""
    if cls == CONVEX:
        for r in (chart_R / 6.0, chart_R / 10.0, chart_R / 16.0, chart_R / 24.0):
            got = _fillet(ds.arm1, ds.arm2, r, spacing)
            if got is None:
                continue
            sa, sb, arc = got
            new_win, (j1, j2) = _assemble_window(win, iv, sa, sb, arc)
            yield new_win, list(range(j1 - 1, j1 + 2)) + list(range(j2 - 1, j2 + 2))
    elif cls == CONCAVE:
        # A circle inscribed in the wedge between the arms; followed the
        # C1 way it caves against the arms' turning, which costs the two
        # inflections a concave vortex requires.
        radii = (chart_R / 5.0, chart_R / 8.0, chart_R / 12.0,
                 chart_R / 20.0, chart_R / 32.0)
        for r in radii:
            got = _fillet(ds.arm1, ds.arm2, r, spacing)
            if got is None:
                continue
            sa, sb, arc = got
            new_win, (j1, j2) = _assemble_window(win, iv, sa, sb, arc)
            yield new_win, list(range(j1 - 1, j1 + 2)) + list(range(j2 - 1, j2 + 2))
    else:
        got = _graph_bridge(win, iv, spacing, tol)
        if got is not None:
            yield got[0], []


# ---------------------------------------------------------------------------
# double point resolution


def resolve_double_point(curve: SampledCurve, pair, tol: Tolerances = DEFAULT_TOL):
    """Replace one transversal self-crossing by two rounded turnbacks.

    Of the two local reconnections at the crossing, the one that keeps the
    curve connected is kept (for a single closed curve that is always the
    orientation-reversing exchange; the orientation-preserving one splits
    the curve in two and is discarded).  The two corners left by the
    reconnection are rounded by tangent circles.  Costs at most two
    inflections and removes one double point, so 2(D+ + S) + I cannot
    increase.
    """
    from . import incidence

    rep_b, I_b, S_b, Dp_b, sp_b = _report_counts(curve, tol, PreconditionViolated)
    dplus, _anti = incidence.coincidence_pairs(curve, tol)
    if dplus.count == 0 or not dplus.pairs:
        raise NotDouble("curve has no coincident pair to resolve")
    period = curve.period

    def cyc(a, b):
        d = abs(a - b) % period
        return min(d, period - d)

    t_req, s_req = float(pair[0]), float(pair[1])
    width = tol.cluster_width(curve.params, period)
    best = None
    for (tt, ss) in dplus.pairs:
        d = min(cyc(tt, t_req) + cyc(ss, s_req), cyc(tt, s_req) + cyc(ss, t_req))
        if best is None or d < best[0]:
            best = (d, tt, ss)
    if best is None or best[0] > 6.0 * max(width, tol.eps_zero * period):
        raise NotDouble("no coincident pair near the requested parameters")
    t0, s0 = best[1], best[2]

    it = int(np.argmin(np.minimum(np.abs(curve.params - t0),
                                  period - np.abs(curve.params - t0))))
    is_ = int(np.argmin(np.minimum(np.abs(curve.params - s0),
                                   period - np.abs(curve.params - s0))))
    x = 0.5 * (curve.points[it] + curve.points[is_])
    if curve.ambient == "sphere":
        x = x / np.linalg.norm(x)
    diam = float(np.linalg.norm(
        curve.points.max(axis=0) - curve.points.min(axis=0)))
    for (tt, ss) in dplus.pairs:
        if (tt, ss) == (t0, s0):
            continue
        jt = int(np.argmin(np.minimum(np.abs(curve.params - tt),
                                      period - np.abs(curve.params - tt))))
        if np.linalg.norm(curve.points[jt] - x) < 3.0 * tol.match_radius(diam):
            raise NotDouble("crossing has multiplicity above two")

    n = curve.n
    arm_len = min(28, max(10, n // 8))
    gap_ts = (is_ - it) % n
    gap_st = (it - is_) % n
    if min(gap_ts, gap_st) <= 2 * arm_len + 4:
        arm_len = max((min(gap_ts, gap_st) - 4) // 2, 6)
    if arm_len < 6:
        raise NotDouble("crossing arcs too short to rebuild")

    IA1 = [(is_ - j) % n for j in range(arm_len + 1)]
    OA1 = [(it - j) % n for j in range(arm_len + 1)]
    IA2 = [(is_ + j) % n for j in range(arm_len + 1)]
    OA2 = [(it + j) % n for j in range(arm_len + 1)]

    if curve.ambient == "sphere":
        chart = lambda idxs: _to_chart(curve.points[idxs], x)
        unchart = lambda xy: _from_chart(xy, x)
    else:
        chart = lambda idxs: curve.points[idxs] - x
        unchart = lambda xy: xy + x

    arms = {k: chart(v) for k, v in (("IA1", IA1), ("OA1", OA1),
                                     ("IA2", IA2), ("OA2", OA2))}
    spacing = float(np.median(np.linalg.norm(np.diff(arms["IA1"], axis=0), axis=1)))
    r0 = 0.25 * min(_ArmPath(a).L for a in arms.values())

    # The orientation-preserving exchange closes each arc on itself; both
    # halves are genuine loops, so that reconnection leaves two components
    # and is discarded in favor of the orientation-reversing one below.
    half_a = curve.points[[(it + j) % n for j in range(gap_ts + 1)]]
    half_b = curve.points[[(is_ + j) % n for j in range(gap_st + 1)]]
    if len(half_a) < 4 or len(half_b) < 4:
        raise NotDouble("crossing arcs degenerate")

    last_error = DisconnectedResult("no reconnection produced a single closed curve")
    for scale in (1.0, 0.55, 0.3):
        r = r0 * scale
        f1 = _fillet(arms["IA1"], arms["OA1"], r, spacing)
        f2 = _fillet(arms["IA2"], arms["OA2"], r, spacing)
        if f1 is None or f2 is None:
            continue
        sa1, sb1, arc1 = f1
        sa2, sb2, arc2 = f2
        c_in1 = int(np.ceil(_ArmPath(arms["IA1"]).frac_index(sa1) - 1e-9))
        c_out1 = int(np.ceil(_ArmPath(arms["OA1"]).frac_index(sb1) - 1e-9))
        c_in2 = int(np.ceil(_ArmPath(arms["IA2"]).frac_index(sa2) - 1e-9))
        c_out2 = int(np.ceil(_ArmPath(arms["OA2"]).frac_index(sb2) - 1e-9))
        lenA = ((is_ - c_in1) - (it + c_out2)) % n
        lenB = ((it - c_out1) - (is_ + c_in2)) % n
        if lenA < 2 or lenB < 2:
            continue
        segA = [(it + c_out2 + j) % n for j in range(lenA + 1)]
        segB = [((it - c_out1) - j) % n for j in range(lenB + 1)]
        pts_list = [
            curve.points[segA],
            unchart(arc1),
            curve.points[segB],
            unchart(arc2),
        ]
        seq = _dedupe(np.vstack(pts_list))
        j_marks = []
        acc = 0
        for piece in pts_list[:-1]:
            acc += len(piece)
            j_marks.extend([acc - 1, acc])
        seq = _smooth_near(seq, [j % len(seq) for j in j_marks], half=3, passes=2,
                           closed=True)
        if curve.ambient == "sphere":
            seq = seq / np.linalg.norm(seq, axis=1, keepdims=True)
        seg = np.linalg.norm(np.diff(seq, axis=0), axis=1)
        closing = float(np.linalg.norm(seq[0] - seq[-1]))
        total = float(seg.sum()) + closing
        params = np.concatenate([[0.0], np.cumsum(seg)])
        if len(seq) < 8:
            continue
        out = SampledCurve(points=seq, params=params, closed=True,
                           ambient=curve.ambient, period=total)
        try:
            rep_a, I_a, S_a, Dp_a, sp_a = _report_counts(out, tol)
        except SurgeryContractViolated as exc:
            last_error = exc
            continue
        added = I_a - I_b
        if Dp_a != Dp_b - 1 or S_a != S_b or added > 2 or sp_a > sp_b:
            last_error = SurgeryContractViolated(
                "reconnection changed counts beyond its budget "
                "(D+ %d->%d, S %d->%d, I %d->%d)" % (Dp_b, Dp_a, S_b, S_a, I_b, I_a)
            )
            continue
        return SurgeryOutcome(
            result=out, inflections_added=added,
            sigma_plus_before=sp_b, sigma_plus_after=sp_a,
        )
    raise last_error


# ---------------------------------------------------------------------------
# tangential intersections


def separate_tangential_intersection(branch1: GraphArc, branch2: GraphArc,
                                     tol: Tolerances = DEFAULT_TOL):
    """Perturb two graph branches so they meet at most once, transversally.

    A transversal crossing is left alone.  An odd-order tangential
    crossing is tilted into a transversal one; an even-order touch is
    pushed apart entirely (a single transversal crossing is impossible
    there, since the difference has equal signs at both window ends).
    When one branch fails to be twice differentiable at the meeting point
    (a cusp seen edge-on), the smooth branch is bumped until every
    remaining meeting is transversal and away from the irregular point;
    a one-sided touch against a cusp then ends up missed entirely or
    crossed twice.  Neither branch changes near its endpoints.
    """
    a = max(branch1.x[0], branch2.x[0])
    b = min(branch1.x[-1], branch2.x[-1])
    if b - a <= 0:
        raise PreconditionViolated("branches share no domain")
    xg = np.linspace(a, b, 1401)
    h = xg[1] - xg[0]
    f1 = branch1(xg)
    f2 = branch2(xg)
    d = f1 - f2

    def slope_cap(arc):
        dv = np.abs(np.diff(arc(xg))) / h
        return float(np.max(dv))

    sing1 = slope_cap(branch1) > 30.0 or _irregular(branch1)
    sing2 = slope_cap(branch2) > 30.0 or _irregular(branch2)
    if sing1 and sing2:
        raise PreconditionViolated("both branches are singular in the window")

    scale = max(float(np.max(np.abs(d))), 1e-300)
    fld = ScalarField(values=d, params=xg.copy(), closed=False, scale=scale)
    clusters = count_zero_clusters(fld, tol)
    if not is_finite_count(clusters.count):
        raise PreconditionViolated("branches coincide over an interval")
    if clusters.count == 0:
        return branch1, branch2
    if clusters.count > 1:
        raise PreconditionViolated("branches intersect more than once")
    x0 = float(clusters.locations[0])
    halfw = min(x0 - a, b - x0)
    if halfw <= 4 * h:
        raise PreconditionViolated("intersection too close to a window end")

    if sing1 or sing2:
        smooth, other, smooth_first = (
            (branch2, branch1, False) if sing1 else (branch1, branch2, True)
        )
        new = _bump_off_singularity(smooth, other, x0, halfw, xg, h, tol)
        if new is None:
            raise ClassificationFailed("no bump moved the crossing to a regular point")
        return (new, other) if smooth_first else (other, new)

    j0 = int(np.argmin(np.abs(xg - x0)))
    dp = np.gradient(d, h)
    trans_ratio = abs(dp[j0]) / (np.max(np.abs(d)) / halfw + 1e-300)
    band = fld.band(tol.eps_zero)
    out_idx = np.nonzero(np.abs(d) > band)[0]
    s_before = np.sign(d[out_idx[out_idx < j0]][-1]) if np.any(out_idx < j0) else 0.0
    s_after = np.sign(d[out_idx[out_idx > j0]][0]) if np.any(out_idx > j0) else 0.0
    if s_before == 0.0 or s_after == 0.0:
        raise PreconditionViolated("intersection touches a window end")

    if s_before != s_after:
        if trans_ratio > 0.25:
            return branch1, branch2
        phi = _plateau(xg - x0, halfw / 4.0, halfw / 2.0)
        mag = float(np.max(np.abs(d))) / halfw
        for k in range(2, 32):
            # tilt with the same outer sign pattern as d, so no root pair
            # is born beside the original one
            epsk = s_after * mag * 2.0 ** (-k)
            d2 = d + epsk * (xg - x0) * phi
            if _crossing_profile(d2, xg, h, halfw, tol) == "one-transversal":
                bump = epsk * (branch2.x - x0) * _plateau(
                    branch2.x - x0, halfw / 4.0, halfw / 2.0)
                return branch1, GraphArc(branch2.x.copy(), branch2.y - bump,
                                         branch2.tags)
        raise ClassificationFailed("no tilt made the tangency transversal")

    # even-order touch: push the branches apart
    sigma = s_before
    phi = _plateau(xg - x0, halfw / 4.0, halfw / 2.0)
    need = 2.0 * float(np.max(np.abs(d[np.abs(xg - x0) < halfw / 4.0]))) + 8.0 * band
    for k in range(0, 20):
        dk = need * 2.0 ** k
        d2 = d + sigma * dk * phi
        if _crossing_profile(d2, xg, h, halfw, tol) == "none":
            bump = sigma * dk * _plateau(branch2.x - x0, halfw / 4.0, halfw / 2.0)
            return branch1, GraphArc(branch2.x.copy(), branch2.y - bump,
                                     branch2.tags)
        if dk > 1e6 * need:
            break
    raise ClassificationFailed("no push separated the touching branches")


def _irregular(arc):
    return any(t not in ("C2", "smooth", "regular") for t in arc.tags)


def _crossing_profile(d, xg, h, halfw, tol):
    scale = max(float(np.max(np.abs(d))), 1e-300)
    fld = ScalarField(values=d, params=xg.copy(), closed=False, scale=scale)
    c = count_zero_clusters(fld, tol)
    if not is_finite_count(c.count):
        return "degenerate"
    if c.count == 0:
        off = count_sign_changes(fld, tol)
        if is_finite_count(off.count) and off.count == 0:
            return "none"
        return "many"
    if c.count > 1:
        return "many"
    sc = count_sign_changes(fld, tol)
    if not (is_finite_count(sc.count) and sc.count == 1):
        return "touch"
    x0 = float(c.locations[0])
    j0 = int(np.argmin(np.abs(xg - x0)))
    dp = np.gradient(d, h)
    ratio = abs(dp[j0]) / (scale / halfw + 1e-300)
    return "one-transversal" if ratio > 0.25 else "tangential"


def _bump_off_singularity(smooth, other, x0, halfw, xg, h, tol):
    """Bump the smooth branch off an irregular meeting point.

    Accepts the first bump after which the branches either miss each
    other or meet at most twice, transversally, away from the irregular
    point.  A one-sided touch against a cusp leaves no other option: it
    can only split into zero or two crossings.
    """
    # Validate candidates at well below the knot resolution: a kink in the
    # singular branch makes its spline wiggle between knots, and a bump
    # whose crossings hide between grid points must not be accepted.
    knots = other.x
    near = knots[np.abs(knots - x0) < halfw]
    kspace = float(np.median(np.diff(near))) if len(near) > 3 else h
    standoff = max(4.0 * h, 2.0 * kspace)
    xf = np.unique(np.concatenate([
        xg, x0 + np.linspace(-halfw / 2.0, halfw / 2.0, 2001)]))
    xf = xf[(xf >= xg[0]) & (xf <= xg[-1])]
    ovf = other(xf)
    o_slope = np.abs(np.gradient(ovf, xf))
    mag0 = max(float(np.max(np.abs(smooth(xg) - other(xg)))), halfw) * 1e-3
    for sgn in (1.0, -1.0):
        for k in range(0, 24):
            dk = sgn * mag0 * 2.0 ** k
            bump = dk * _plateau(smooth.x - x0, halfw / 4.0, halfw / 2.0)
            cand = GraphArc(smooth.x.copy(), smooth.y + bump, smooth.tags)
            d2 = cand(xf) - ovf
            if _regular_meetings(d2, o_slope, x0, xf, standoff, halfw, tol):
                return cand
    return None


def _regular_meetings(d2, o_slope, x0, xg, standoff, halfw, tol):
    """Accept only sign structures with 0-2 clean crossings off ``x0``.

    Works on raw above-band sign runs rather than the merged field
    counters: an artifact pair of crossings narrower than the cluster
    width is noise to a count, but here it is a genuine meeting of the
    two branches and must block acceptance.
    """
    scale = max(float(np.max(np.abs(d2))), 1e-300)
    band = tol.eps_zero * scale
    out = np.abs(d2) > band
    if not np.any(out):
        return False
    idx_out = np.nonzero(out)[0]
    s = np.sign(d2[idx_out])
    flips = np.nonzero(s[1:] != s[:-1])[0]
    if len(flips) > 2:
        return False
    fld = ScalarField(values=d2, params=xg.copy(), closed=False, scale=scale)
    c = count_zero_clusters(fld, tol)
    if not is_finite_count(c.count):
        return False
    roots = []
    dp = np.gradient(d2, xg)
    for f in flips:
        j_lo, j_hi = int(idx_out[f]), int(idx_out[f + 1])
        xr = 0.5 * (xg[j_lo] + xg[j_hi])
        if xg[j_hi] - xg[j_lo] > standoff:
            return False
        jr = (j_lo + j_hi) // 2
        if o_slope[jr] > 30.0:
            return False
        if abs(xr - x0) < standoff:
            return False
        if abs(dp[jr]) / (scale / halfw + 1e-300) <= 0.25:
            return False
        roots.append(xr)
    # every in-band passage must belong to one of the crossings; a leftover
    # is a touch that survived the bump
    width = tol.cluster_width(xg, None)
    for xc in np.asarray(c.locations, dtype=float):
        if not roots or np.min(np.abs(np.asarray(roots) - xc)) > max(width, standoff):
            return False
    return True

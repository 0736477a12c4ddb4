"""Frenet frames, tantrix, geodesic curvature, and robust zero counting.

The counting strategy throughout: never count sign changes of a quotient.
Curvature, torsion, and their derivatives are all ratios with positive
denominators away from singular points, so each counter works on the
polynomial-in-derivatives numerator instead.  Numerators stay finite and
smooth across cusps and inflections, where the quotients blow up or lose
meaning, and they have exactly the same sign pattern on the regular part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SingularCurve
from .geom import (
    DEFAULT_TOL,
    NormalizedTangentGenerator,
    SampledCurve,
    ScalarField,
    Tolerances,
    differentiate,
)

INFINITE = "INFINITE"
DEGENERATE = "DEGENERATE"


def is_finite_count(x):
    return not isinstance(x, str)


@dataclass
class CountResult:
    """Outcome of a zero / sign-change count.

    count          sign-changing zero events (or INFINITE / DEGENERATE)
    genuine_count  events that are single isolated crossings (narrow cluster)
    locations      parameter values of all detected zero events, touches
                   included, sorted
    kinds          per-location tag: "crossing" or "touch"
    """

    count: object
    genuine_count: object
    locations: np.ndarray = field(default_factory=lambda: np.empty(0))
    kinds: tuple = ()

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=float)

    @property
    def degenerate(self):
        return self.count == DEGENERATE

    @property
    def infinite(self):
        return self.count == INFINITE


def _sentinel(which):
    return CountResult(count=which, genuine_count=which)


def _cyclic_clusters(mask, n):
    """Maximal runs of True in a cyclic boolean mask, as (start, length)."""
    if not mask.any():
        return []
    if mask.all():
        return [(0, n)]
    idx = np.nonzero(mask)[0]
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    runs = []
    start = idx[0]
    prev = idx[0]
    for b in breaks:
        runs.append((start, idx[b] - start + 1))
        start = idx[b + 1]
    runs.append((start, idx[-1] - start + 1))
    # cyclic merge of first and last runs
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][0] + runs[-1][1] == n:
        s, l = runs.pop()
        first = runs.pop(0)
        runs.append((s, l + first[1]))
    return runs


def _circular_mean(params, period, lo):
    """Mean of parameter values on a circle of given period."""
    ang = (params - lo) * (2.0 * np.pi / period)
    z = np.exp(1j * ang).mean()
    if abs(z) < 1e-12:
        return float(params.mean())
    return lo + (np.angle(z) % (2.0 * np.pi)) * period / (2.0 * np.pi)


def count_sign_changes(field: ScalarField, tol: Tolerances = DEFAULT_TOL):
    """Count dead-band-aware sign changes of a scalar field along its curve.

    Consecutive sub-dead-band samples merge into one candidate event;
    events closer than the cluster width merge further.  An event is a
    crossing iff the flanking signs differ, and genuine iff additionally
    its cluster is narrower than the cluster width.  Returns the
    DEGENERATE sentinel when the dead band swallows more than the
    degenerate fraction of all samples.
    """
    v = field.values
    n = len(v)
    if n < 2:
        return _sentinel(DEGENERATE)
    band = field.band(tol.eps_zero)
    inband = np.abs(v) <= band
    if band == 0.0 or inband.mean() > tol.degenerate_fraction:
        return _sentinel(DEGENERATE)
    period = field.period if field.closed else None
    width = tol.cluster_width(field.params, period)

    # Candidate events: in-band runs, plus width-zero events at direct sign
    # flips between adjacent out-of-band samples.
    events = []  # (lo_param, hi_param, sign_before_index, sign_after_index)
    s = np.where(inband, 0, np.sign(v)).astype(int)

    if field.closed:
        pr = field.params
        per = field.period

        def param(i):
            wraps, j = divmod(i, n)
            return pr[j] + wraps * per

        out_idx = np.nonzero(~inband)[0]
        if len(out_idx) == 0:
            return _sentinel(DEGENERATE)
        m = len(out_idx)
        for a in range(m):
            i = out_idx[a]
            j = out_idx[(a + 1) % m]
            jj = j if j > i else j + n
            if jj == i + 1:
                if s[i] != s[j % n]:
                    mid = 0.5 * (param(i) + param(i + 1))
                    events.append([mid, mid, s[i], s[j % n]])
            else:
                lo = param(i + 1)
                hi = param(jj - 1)
                events.append([lo, hi, s[i], s[j % n]])
    else:
        out_idx = np.nonzero(~inband)[0]
        if len(out_idx) == 0:
            return _sentinel(DEGENERATE)
        pr = field.params
        for a in range(len(out_idx) - 1):
            i, j = out_idx[a], out_idx[a + 1]
            if j == i + 1:
                if s[i] != s[j]:
                    mid = 0.5 * (pr[i] + pr[j])
                    events.append([mid, mid, s[i], s[j]])
            else:
                events.append([pr[i + 1], pr[j - 1], s[i], s[j]])

    if not events:
        return CountResult(count=0, genuine_count=0)

    # Merge events separated by less than the cluster width; the flanking
    # signs of a merged event come from its outermost neighbors.
    merged = [events[0]]
    for ev in events[1:]:
        if ev[0] - merged[-1][1] < width:
            merged[-1][1] = ev[1]
            merged[-1][3] = ev[3]
        else:
            merged.append(ev)
    if field.closed and len(merged) > 1:
        gap_around = (merged[0][0] + field.period) - merged[-1][1]
        if gap_around < width:
            first = merged.pop(0)
            merged[-1][1] = first[1] + field.period
            merged[-1][3] = first[3]

    count = 0
    genuine = 0
    locations = []
    kinds = []
    lo_param = field.params[0]
    for lo, hi, sb, sa in merged:
        crossing = sb != sa
        narrow = (hi - lo) < width
        if crossing:
            count += 1
            if narrow:
                genuine += 1
        locations.append(_wrap_param(0.5 * (lo + hi), lo_param, period))
        kinds.append("crossing" if crossing else "touch")
    order = np.argsort(locations)
    return CountResult(
        count=count,
        genuine_count=genuine,
        locations=np.asarray(locations)[order],
        kinds=tuple(kinds[i] for i in order),
    )


def _wrap_param(t, lo, period):
    if period is None:
        return float(t)
    return float(lo + (t - lo) % period)


def count_zero_clusters(field: ScalarField, tol: Tolerances = DEFAULT_TOL):
    """Count clusters where a (typically nonnegative) field enters the dead
    band, regardless of flanking signs.  Used for curvature zeros of space
    curves, where the field is a norm and never changes sign."""
    v = field.values
    n = len(v)
    band = field.band(tol.eps_zero)
    inband = np.abs(v) <= band
    if band == 0.0 or inband.mean() > tol.degenerate_fraction:
        return _sentinel(DEGENERATE)
    runs = _cyclic_clusters(inband, n) if field.closed else _linear_runs(inband)
    period = field.period if field.closed else None
    width = tol.cluster_width(field.params, period)
    locs = []
    for start, length in runs:
        idx = np.arange(start, start + length) % n
        pr = field.params[idx].copy()
        if field.closed:
            wrap = np.nonzero(np.diff(pr) < 0)[0]
            if len(wrap):
                pr[wrap[0] + 1:] += field.period
        locs.append((pr[0], pr[-1]))
    locs.sort()
    merged = []
    for lo, hi in locs:
        if merged and lo - merged[-1][1] < width:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    if field.closed and len(merged) > 1:
        if (merged[0][0] + field.period) - merged[-1][1] < width:
            first = merged.pop(0)
            merged[-1][1] = first[1] + field.period
    centers = [
        _wrap_param(0.5 * (lo + hi), field.params[0], period) for lo, hi in merged
    ]
    genuine = sum(1 for lo, hi in merged if (hi - lo) < width)
    order = np.argsort(centers)
    return CountResult(
        count=len(merged),
        genuine_count=genuine,
        locations=np.asarray(centers)[order],
        kinds=("touch",) * len(merged),
    )


def _linear_runs(mask):
    runs = []
    start = None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        elif not m and start is not None:
            runs.append((start, i - start))
            start = None
    if start is not None:
        runs.append((start, len(mask) - start))
    return runs


@dataclass
class FrenetData:
    """Per-sample Frenet apparatus of a 3-space curve.

    tau is NaN (and defined False) wherever curvature sits inside the dead
    band; the frame vectors are NaN there as well except T.
    """

    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    speed: np.ndarray
    defined: np.ndarray
    params: np.ndarray


def _derivs(curve, tol, orders=(1, 2, 3)):
    return [differentiate(curve, k, tol) for k in orders]


def _require_regular(curve, speed, tol, what="operation"):
    top = speed.max()
    bad = np.nonzero(speed <= tol.eps_speed * top)[0]
    if len(bad):
        raise SingularCurve(
            "%s needs a regular curve; speed vanishes near params %s"
            % (what, np.round(curve.params[bad[:8]], 6).tolist())
        )


def frenet(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> FrenetData:
    """Tangent/normal/binormal frame with curvature and torsion."""
    if curve.dim != 3:
        raise ValueError("Frenet frame needs a curve in 3-space")
    d1, d2, d3 = _derivs(curve, tol)
    speed = np.linalg.norm(d1, axis=1)
    _require_regular(curve, speed, tol, "frenet")
    T = d1 / speed[:, None]
    cross = np.cross(d1, d2)
    cn = np.linalg.norm(cross, axis=1)
    kappa = cn / speed**3
    band = tol.zero_band(kappa)
    defined = kappa > band
    with np.errstate(divide="ignore", invalid="ignore"):
        B = np.where(defined[:, None], cross / np.where(cn == 0, 1, cn)[:, None], np.nan)
        tau = np.where(defined, np.einsum("ij,ij->i", cross, d3) / np.where(cn == 0, 1, cn) ** 2, np.nan)
    N = np.cross(B, T)
    return FrenetData(
        T=T, N=N, B=B, kappa=kappa, tau=tau, speed=speed,
        defined=defined, params=curve.params.copy(),
    )


def tantrix(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> SampledCurve:
    """Unit-tangent image of a regular curve, as a spherical curve.

    Plane curves are embedded in the z = 0 plane first, so their tantrix
    traces the equator.  Curves carrying an analytic generator hand an
    exact-derivative generator to the image.
    """
    if curve.dim == 2:
        pts3 = np.column_stack([curve.points, np.zeros(curve.n)])
        curve = SampledCurve(
            points=pts3, params=curve.params, closed=curve.closed,
            ambient="space", period=curve.period, generator=None,
        )
    d1 = differentiate(curve, 1, tol)
    speed = np.linalg.norm(d1, axis=1)
    _require_regular(curve, speed, tol, "tantrix")
    T = d1 / speed[:, None]
    gen = NormalizedTangentGenerator(curve.generator) if curve.generator is not None else None
    return SampledCurve(
        points=T, params=curve.params.copy(), closed=curve.closed,
        ambient="sphere", period=curve.period, generator=gen,
    )


def geodesic_curvature(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> ScalarField:
    """Signed geodesic curvature of a spherical curve (or signed curvature
    of a plane curve), with normal = position x tangent on the sphere and
    the left-hand normal in the plane."""
    d1 = differentiate(curve, 1, tol)
    d2 = differentiate(curve, 2, tol)
    speed = np.linalg.norm(d1, axis=1)
    _require_regular(curve, speed, tol, "geodesic curvature")
    if curve.ambient == "sphere":
        num = np.einsum("ij,ij->i", curve.points, np.cross(d1, d2))
    elif curve.ambient == "plane":
        num = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    else:
        raise ValueError("geodesic curvature needs a sphere or plane curve")
    return ScalarField.over(curve, num / speed**3, name="geodesic_curvature")


def inflection_numerator(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> ScalarField:
    """Field with the sign pattern of the (geodesic) curvature, finite and
    smooth even across cusps: det(p, p', p'') on the sphere,
    det(p', p'') in the plane."""
    d1 = differentiate(curve, 1, tol)
    d2 = differentiate(curve, 2, tol)
    n1 = np.linalg.norm(d1, axis=1)
    n2 = np.linalg.norm(d2, axis=1)
    if curve.ambient == "sphere":
        num = np.einsum("ij,ij->i", curve.points, np.cross(d1, d2))
    elif curve.ambient == "plane":
        num = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    else:
        raise ValueError("inflection numerator needs a sphere or plane curve")
    return ScalarField.over(
        curve, num, name="inflection_numerator", scale=float((n1 * n2).max())
    )


def vertex_numerator(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> ScalarField:
    """Field with the sign pattern of d(curvature)/ds for sphere or plane
    curves: v^2 A' - 3 (p'.p'') A, where A is the curvature numerator."""
    d1 = differentiate(curve, 1, tol)
    d2 = differentiate(curve, 2, tol)
    d3 = differentiate(curve, 3, tol)
    v2 = np.einsum("ij,ij->i", d1, d1)
    dd = np.einsum("ij,ij->i", d1, d2)
    if curve.ambient == "sphere":
        A = np.einsum("ij,ij->i", curve.points, np.cross(d1, d2))
        Ap = np.einsum("ij,ij->i", curve.points, np.cross(d1, d3))
    elif curve.ambient == "plane":
        A = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        Ap = d1[:, 0] * d3[:, 1] - d1[:, 1] * d3[:, 0]
    else:
        raise ValueError("vertex numerator needs a sphere or plane curve")
    n1 = np.linalg.norm(d1, axis=1)
    n2 = np.linalg.norm(d2, axis=1)
    n3 = np.linalg.norm(d3, axis=1)
    ceil = v2 * n1 * n3 + 3.0 * n1 * n2 * n1 * n2
    return ScalarField.over(
        curve, v2 * Ap - 3.0 * dd * A, name="vertex_numerator", scale=float(ceil.max())
    )


def torsion_numerator(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> ScalarField:
    """det(p', p'', p'''): the sign pattern of torsion away from inflections."""
    d1, d2, d3 = _derivs(curve, tol)
    num = np.einsum("ij,ij->i", np.cross(d1, d2), d3)
    ceil = (
        np.linalg.norm(d1, axis=1)
        * np.linalg.norm(d2, axis=1)
        * np.linalg.norm(d3, axis=1)
    )
    return ScalarField.over(
        curve, num, name="torsion_numerator", scale=float(ceil.max())
    )


def space_curvature_extremum_numerator(curve, tol: Tolerances = DEFAULT_TOL) -> ScalarField:
    """Sign pattern of d(kappa)/ds for a space curve:
    v^2 (A.A') - 3 (p'.p'') |A|^2 with A = p' x p''."""
    d1, d2, d3 = _derivs(curve, tol)
    A = np.cross(d1, d2)
    Ap = np.cross(d1, d3)
    v2 = np.einsum("ij,ij->i", d1, d1)
    dd = np.einsum("ij,ij->i", d1, d2)
    vals = v2 * np.einsum("ij,ij->i", A, Ap) - 3.0 * dd * np.einsum("ij,ij->i", A, A)
    nA = np.linalg.norm(A, axis=1)
    n1 = np.linalg.norm(d1, axis=1)
    n2 = np.linalg.norm(d2, axis=1)
    n3 = np.linalg.norm(d3, axis=1)
    ceil = v2 * nA * n1 * n3 + 3.0 * n1 * n2 * nA * nA
    return ScalarField.over(
        curve, vals, name="curvature_extremum_numerator", scale=float(ceil.max())
    )


def singular_points(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> CountResult:
    """Clusters where the curve fails to be regular: the sampled speed dips
    toward zero, or the discrete turning angle between consecutive chords
    jumps (a sampled cusp shows both signatures)."""
    d1 = differentiate(curve, 1, tol)
    speed = np.linalg.norm(d1, axis=1)
    top = speed.max()
    if top == 0.0:
        return _sentinel(DEGENERATE)
    slow = speed <= tol.eps_speed * top

    chords = np.diff(curve.points, axis=0)
    if curve.closed:
        chords = np.vstack([chords, curve.points[:1] - curve.points[-1:]])
    norms = np.linalg.norm(chords, axis=1)
    ok = norms > 0
    u = np.where(ok[:, None], chords / np.where(ok, norms, 1.0)[:, None], 0.0)
    if curve.closed:
        cosang = np.einsum("ij,ij->i", np.roll(u, 1, axis=0), u)
    else:
        cosang = np.concatenate([[1.0], np.einsum("ij,ij->i", u[:-1], u[1:])])
    turning = np.arccos(np.clip(cosang, -1.0, 1.0))
    sharp = turning > tol.turn_angle

    mask = slow | sharp
    if not mask.any():
        return CountResult(count=0, genuine_count=0)
    if mask.mean() > tol.degenerate_fraction:
        return _sentinel(DEGENERATE)
    n = curve.n
    runs = _cyclic_clusters(mask, n) if curve.closed else _linear_runs(mask)
    period = curve.period if curve.closed else None
    width = tol.cluster_width(curve.params, period)
    spans = []
    for start, length in runs:
        idx = np.arange(start, start + length) % n
        pr = curve.params[idx].copy()
        if curve.closed and length > 1:
            wrap = np.nonzero(np.diff(pr) < 0)[0]
            if len(wrap):
                pr[wrap[0] + 1:] += curve.period
        spans.append([pr[0], pr[-1]])
    spans.sort()
    merged = []
    for lo, hi in spans:
        if merged and lo - merged[-1][1] < width:
            merged[-1][1] = max(hi, merged[-1][1])
        else:
            merged.append([lo, hi])
    if curve.closed and len(merged) > 1:
        if (merged[0][0] + curve.period) - merged[-1][1] < width:
            first = merged.pop(0)
            merged[-1][1] = first[1] + curve.period
    centers = sorted(
        _wrap_param(0.5 * (lo + hi), curve.params[0], period) for lo, hi in merged
    )
    return CountResult(
        count=len(merged),
        genuine_count=len(merged),
        locations=np.asarray(centers),
        kinds=("touch",) * len(merged),
    )


def _count_split(field: ScalarField, cut_params, tol):
    """Sign changes of a field counted within the open components obtained
    by cutting the parameter circle at the given locations (each widened by
    one cluster width).  No event is counted across a cut."""
    if len(cut_params) == 0:
        return count_sign_changes(field, tol)
    width = tol.cluster_width(field.params, field.period if field.closed else None)
    lo = field.params[0]
    per = field.period
    cuts = np.sort((np.asarray(cut_params, dtype=float) - lo) % per) + lo
    total = 0
    genuine = 0
    locations = []
    kinds = []
    degenerate = False
    for a, b in zip(cuts, np.roll(cuts, -1)):
        b_adj = b if b > a else b + per
        sel_lo, sel_hi = a + width, b_adj - width
        if sel_hi <= sel_lo:
            continue
        rel = (field.params - lo) % per + lo
        mask = ((rel - a) % per + a >= sel_lo) & ((rel - a) % per + a <= sel_hi)
        # order samples along the component
        offs = (field.params - a) % per
        idx = np.nonzero(mask)[0]
        if len(idx) < 4:
            continue
        idx = idx[np.argsort(offs[idx])]
        sub = ScalarField(
            values=field.values[idx],
            params=np.sort(offs[idx]) + a,
            closed=False,
            scale=field.scale,
        )
        res = count_sign_changes(sub, tol)
        if res.degenerate:
            degenerate = True
            continue
        total += res.count
        genuine += res.genuine_count
        locations.extend(_wrap_param(x, lo, per) for x in res.locations)
        kinds.extend(res.kinds)
    if degenerate and total == 0:
        return _sentinel(DEGENERATE)
    order = np.argsort(locations) if locations else []
    return CountResult(
        count=total,
        genuine_count=genuine,
        locations=np.asarray(locations)[order] if locations else np.empty(0),
        kinds=tuple(kinds[i] for i in order) if locations else (),
    )


@dataclass
class InvariantReport:
    """Every counted quantity for one closed curve.

    sigma and sigma_plus are the combined counts 2(D+S)+I and 2(D+ + S)+I;
    they carry a sentinel whenever any ingredient does.  D includes both
    coincident and antipodal pairs; D_plus only coincident ones.
    """

    ambient: str
    n: int
    D: CountResult
    D_plus: CountResult
    antipodal: CountResult
    S: CountResult
    I: CountResult
    V: CountResult
    P: CountResult
    P_plus: CountResult
    curvature_extrema: CountResult
    hull_status: Optional[str]
    hemisphere_pole: Optional[np.ndarray]
    sigma: object
    sigma_plus: object

    @property
    def I_genuine(self):
        return self.I.genuine_count

    @property
    def V_genuine(self):
        return self.V.genuine_count


def _add_counts(*parts):
    vals = []
    for p in parts:
        if not is_finite_count(p):
            return p
        vals.append(int(p))
    return sum(vals)


def _pairset_to_count(ps):
    if ps.count == INFINITE:
        return CountResult(count=INFINITE, genuine_count=INFINITE)
    locs = np.asarray(sorted(t for t, _ in ps.pairs)) if ps.pairs else np.empty(0)
    return CountResult(
        count=ps.count, genuine_count=ps.count,
        locations=locs, kinds=("crossing",) * len(locs),
    )


def _inflections_given(curve, tol, S):
    singular = is_finite_count(S.count) and S.count > 0
    cuts = S.locations if singular else np.empty(0)
    if curve.ambient in ("sphere", "plane"):
        infl = inflection_numerator(curve, tol)
        I = _count_split(infl, cuts, tol) if singular else count_sign_changes(infl, tol)
        if not is_finite_count(S.count):
            I = _sentinel(DEGENERATE)
    elif not singular and is_finite_count(S.count):
        # A curvature zero is a singular point of the unit-tangent image,
        # and the cusp detector (speed dip or chord reversal) resolves the
        # narrow dips that a dead band on |p' x p''| cannot.
        I = singular_points(tantrix(curve, tol), tol)
    else:
        d1 = differentiate(curve, 1, tol)
        d2 = differentiate(curve, 2, tol)
        kap = ScalarField.over(curve, np.linalg.norm(np.cross(d1, d2), axis=1))
        I = count_zero_clusters(kap, tol)
    return I


def _vertices_given(curve, tol, S, I):
    singular = is_finite_count(S.count) and S.count > 0
    cuts = S.locations if singular else np.empty(0)
    if curve.ambient == "space":
        tors = torsion_numerator(curve, tol)
        vert_cuts = list(cuts)
        if is_finite_count(I.count):
            vert_cuts.extend(I.locations)
        V = _count_split(tors, np.asarray(vert_cuts), tol) if len(vert_cuts) else count_sign_changes(tors, tol)
        ext = space_curvature_extremum_numerator(curve, tol)
        CE = _count_split(ext, cuts, tol) if singular else count_sign_changes(ext, tol)
    elif curve.ambient == "sphere":
        vert = vertex_numerator(curve, tol)
        V = _count_split(vert, cuts, tol) if singular else count_sign_changes(vert, tol)
        CE = V
    else:
        vert = vertex_numerator(curve, tol)
        CE = _count_split(vert, cuts, tol) if singular else count_sign_changes(vert, tol)
        V = _sentinel(DEGENERATE)
    return V, CE


def count_inflections(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> CountResult:
    """Inflection count alone: sign changes of the curvature numerator on
    sphere/plane curves (restricted to regular components when the curve has
    singular points), zero clusters of |p' x p''| for space curves."""
    return _inflections_given(curve, tol, singular_points(curve, tol))


def count_vertices(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> CountResult:
    """Vertex count alone; see invariant_report for the per-ambient choice
    of field (torsion numerator in space, curvature-derivative numerator on
    the sphere, the sentinel in the plane)."""
    S = singular_points(curve, tol)
    I = _inflections_given(curve, tol, S)
    return _vertices_given(curve, tol, S, I)[0]


def invariant_report(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL) -> InvariantReport:
    """Aggregate every counter for one closed curve.

    Inflection and vertex counts are restricted to the regular components
    when singular points exist, so a cusp never masquerades as an
    inflection even when the curvature sign flips across it.
    """
    from . import incidence

    S = singular_points(curve, tol)
    singular = is_finite_count(S.count) and S.count > 0

    I = _inflections_given(curve, tol, S)
    V, CE = _vertices_given(curve, tol, S, I)

    dplus_ps, anti_ps = incidence.coincidence_pairs(curve, tol)
    D_plus = _pairset_to_count(dplus_ps)
    antipodal = _pairset_to_count(anti_ps)
    d_total = _add_counts(D_plus.count, antipodal.count)
    D = CountResult(
        count=d_total,
        genuine_count=d_total,
        locations=np.sort(np.concatenate([D_plus.locations, antipodal.locations]))
        if is_finite_count(d_total) else np.empty(0),
    )

    if singular or not is_finite_count(S.count):
        P = _sentinel(DEGENERATE)
        P_plus = _sentinel(DEGENERATE)
    else:
        try:
            pplus_ps, disc_ps = incidence.parallel_tangent_pairs(curve, tol)
            P_plus = _pairset_to_count(pplus_ps)
            p_total = _add_counts(P_plus.count, disc_ps.count)
            P = CountResult(count=p_total, genuine_count=p_total)
        except SingularCurve:
            P = _sentinel(DEGENERATE)
            P_plus = _sentinel(DEGENERATE)

    hull_status = None
    hemisphere = None
    if curve.dim == 3:
        hull = incidence.origin_in_hull(curve.points, tol)
        hull_status = hull.status
        if curve.ambient == "sphere":
            hemisphere = incidence.hemisphere_pole(curve, tol)

    sigma = _add_counts(D.count, D.count, S.count, S.count, I.count)
    sigma_plus = _add_counts(D_plus.count, D_plus.count, S.count, S.count, I.count)

    return InvariantReport(
        ambient=curve.ambient,
        n=curve.n,
        D=D, D_plus=D_plus, antipodal=antipodal, S=S, I=I, V=V,
        P=P, P_plus=P_plus, curvature_extrema=CE,
        hull_status=hull_status, hemisphere_pole=hemisphere,
        sigma=sigma, sigma_plus=sigma_plus,
    )

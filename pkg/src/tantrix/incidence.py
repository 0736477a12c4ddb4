"""Self-coincidence, antipodal and parallel-tangent pairs, hull membership,
hemisphere search, and enclosed spherical areas.

Pair detection runs in two passes.  A crossing pass tests every admissible
segment pair with an exact orientation predicate (planar segments in the
plane, great-circle arcs on the sphere), which catches transversal events
whose sample points are far apart.  A proximity pass picks up tangential
events: local minima of the sample distance matrix are polished by a
shrinking grid search on the interpolating spline and kept only when the
polished distance is inside the match radius.  Everything downstream
(dedup, the INFINITE sentinel) treats the two passes uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NotSimple
from .geom import DEFAULT_TOL, SampledCurve, Tolerances
from .invariants import INFINITE

_EXCLUDE_GAPS = 4  # diagonal window, in sample gaps, for self-comparisons


@dataclass
class PairSet:
    """Detected parameter pairs (t, s), canonically t < s where applicable."""

    pairs: list = field(default_factory=list)
    kind: str = "coincident"
    count: object = 0

    def __post_init__(self):
        if self.count == 0 and self.pairs:
            self.count = len(self.pairs)


@dataclass
class HullStatus:
    status: str  # outside | boundary | interior
    witness: object  # unit vector (outside/boundary) or 4 indices (interior)
    distance: float = 0.0  # min-norm distance from origin to the hull
    margin: float = 0.0  # inscribed-ball radius when inside


@dataclass
class AreaResult:
    left: float
    right: float
    bisects: bool


def _periodic_spline(curve):
    x = np.append(curve.params, curve.params[0] + curve.period)
    y = np.vstack([curve.points, curve.points[:1]])
    return CubicSpline(x, y, bc_type="periodic")


def _segment_pairs_crossing_plane(P, Q):
    """Index pairs (i, j) where segment i of polyline P crosses segment j of
    polyline Q, both closed.  Vectorized orientation predicate."""
    n, m = len(P), len(Q)
    A = P
    B = np.roll(P, -1, axis=0)
    C = Q
    D = np.roll(Q, -1, axis=0)
    out = []
    block = max(1, 2_000_000 // max(m, 1))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        a = A[lo:hi, None, :]
        b = B[lo:hi, None, :]
        c = C[None, :, :]
        d = D[None, :, :]
        def cross2(u, v):
            return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

        ab = b - a
        d1 = cross2(ab, c - a)
        d2 = cross2(ab, d - a)
        cd = d - c
        d3 = cross2(cd, a - c)
        d4 = cross2(cd, b - c)
        hit = (d1 * d2 < 0) & (d3 * d4 < 0)
        ii, jj = np.nonzero(hit)
        out.extend(zip((ii + lo).tolist(), jj.tolist()))
    return out


def _segment_pairs_crossing_sphere(P, Q):
    """Index pairs where short great-circle arc i of P crosses arc j of Q.

    Sign tests put each arc's endpoints strictly on opposite sides of the
    other's great-circle plane; a proximity gate discards the antipodal
    branch of the two-circle intersection.
    """
    n, m = len(P), len(Q)
    A = P
    B = np.roll(P, -1, axis=0)
    C = Q
    D = np.roll(Q, -1, axis=0)
    nAB = np.cross(A, B)
    nCD = np.cross(C, D)
    arc_len = np.linalg.norm(B - A, axis=1).max() + np.linalg.norm(D - C, axis=1).max()
    out = []
    block = max(1, 2_000_000 // max(m, 1))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        s1 = np.einsum("ik,jk->ij", nAB[lo:hi], C)
        s2 = np.einsum("ik,jk->ij", nAB[lo:hi], D)
        s3 = np.einsum("jk,ik->ij", nCD, A[lo:hi])
        s4 = np.einsum("jk,ik->ij", nCD, B[lo:hi])
        near = np.linalg.norm(
            (0.5 * (A + B))[lo:hi, None, :] - (0.5 * (C + D))[None, :, :], axis=2
        ) < 2.0 * arc_len
        hit = (s1 * s2 < 0) & (s3 * s4 < 0) & near
        ii, jj = np.nonzero(hit)
        out.extend(zip((ii + lo).tolist(), jj.tolist()))
    return out


def _crossing_param(p0, p1, q0, q1):
    """Fractions (u, v) along the two chords at the crossing point."""
    d = p1 - p0
    e = q1 - q0
    w = q0 - p0
    if p0.shape[0] == 2:
        den = d[0] * e[1] - d[1] * e[0]
        if abs(den) < 1e-30:
            return 0.5, 0.5
        u = (w[0] * e[1] - w[1] * e[0]) / den
        v = (w[0] * d[1] - w[1] * d[0]) / den
    else:
        M = np.column_stack([d, -e])
        sol, *_ = np.linalg.lstsq(M, w, rcond=None)
        u, v = sol
    return float(np.clip(u, 0.0, 1.0)), float(np.clip(v, 0.0, 1.0))


def _refine_pair(fA, fB, t0, s0, wt, ws, loA, loB, periodA, periodB, rounds=20):
    """Shrinking 5x5 grid search minimizing |fA(t) - fB(s)|.

    Parameters are wrapped into the splines' fundamental domains before
    evaluation; periodic splines extrapolate badly outside them.
    """
    wrapA = lambda t: loA + (t - loA) % periodA
    wrapB = lambda s: loB + (s - loB) % periodB
    t, s = t0, s0
    for _ in range(rounds):
        ts = t + np.linspace(-wt, wt, 5)
        ss = s + np.linspace(-ws, ws, 5)
        pa = fA(wrapA(ts))
        pb = fB(wrapB(ss))
        d2 = ((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        t, s = ts[i], ss[j]
        wt *= 0.5
        ws *= 0.5
    d = float(np.linalg.norm(fA(np.array([wrapA(t)]))[0] - fB(np.array([wrapB(s)]))[0]))
    return float(wrapA(t)), float(wrapB(s)), d


def _cyc_dist(a, b, period):
    d = abs(a - b) % period
    return min(d, period - d)


def _dedupe_pairs(cands, widthA, widthB, periodA, periodB, symmetric=False):
    """Greedy merge of (t, s) candidates within a cluster width in both
    coordinates; keeps the first (best) representative of each cluster.

    When the underlying incidence relation is symmetric (self-coincidence
    and antipodal scans, where (t, s) and (s, t) name the same event), the
    swapped assignment is merged as well."""
    kept = []
    for t, s in cands:
        dup = False
        for tt, ss in kept:
            if (_cyc_dist(t, tt, periodA) < widthA
                    and _cyc_dist(s, ss, periodB) < widthB):
                dup = True
                break
            if symmetric and (_cyc_dist(t, ss, periodA) < widthA
                              and _cyc_dist(s, tt, periodB) < widthB):
                dup = True
                break
        if not dup:
            kept.append((t, s))
    return kept


def _pair_scan(curveA, curveB, tol, self_scan, capture_mult=3.0, symmetric=None):
    """All (t, s) with curveA(t) = curveB(s) within the match radius.

    curveB may be the antipodal image of curveA; `self_scan` switches on
    the diagonal exclusion window and canonical (t<s) ordering.
    `symmetric` marks scans where (t, s) and (s, t) name the same event
    (defaults to self_scan; the antipodal scan sets it explicitly).
    Returns (pairs, infinite_flag).
    """
    if symmetric is None:
        symmetric = self_scan
    P = curveA.points
    Q = curveB.points
    diam = max(curveA.diameter(), curveB.diameter(), 1e-300)
    match_r = tol.match_radius(diam)

    # Sentinel pre-check: pointwise coincidence fraction.
    d2 = np.einsum("ij,ij->i", P, P)[:, None] + np.einsum("ij,ij->i", Q, Q)[None, :] \
        - 2.0 * (P @ Q.T)
    np.maximum(d2, 0.0, out=d2)
    if self_scan:
        n = len(P)
        idx = np.arange(n)
        sep = np.minimum((idx[:, None] - idx[None, :]) % n,
                         (idx[None, :] - idx[:, None]) % n)
        d2 = np.where(sep <= _EXCLUDE_GAPS, np.inf, d2)
    dmin = np.sqrt(d2.min(axis=1))
    frac = (dmin < max(match_r, 1e-12)).mean()
    if frac > tol.degenerate_fraction:
        return [], True

    gapsA = curveA.gaps()
    exclude_param = (_EXCLUDE_GAPS + 1) * float(np.median(np.diff(curveA.params)))

    # Crossing pass.
    if curveA.ambient == "plane":
        hits = _segment_pairs_crossing_plane(P, Q)
    elif curveA.ambient == "sphere":
        hits = _segment_pairs_crossing_sphere(P, Q)
    else:
        hits = []
    nA, nB = len(P), len(Q)
    prA = curveA.params
    prB = curveB.params

    def seg_param(curve, pr, i, frac):
        nxt = pr[(i + 1) % len(pr)] if i + 1 < len(pr) else pr[0] + curve.period
        lo = pr[i]
        return lo + frac * (nxt - lo)

    cands = []
    for i, j in hits:
        if self_scan:
            sep = min((i - j) % nA, (j - i) % nA)
            if sep <= _EXCLUDE_GAPS:
                continue
            if i > j:
                continue  # each unordered pair once
        u, v = _crossing_param(P[i], P[(i + 1) % nA], Q[j], Q[(j + 1) % nB])
        t = seg_param(curveA, prA, i, u)
        s = seg_param(curveB, prB, j, v)
        cands.append((t, s, 0.0))

    # Proximity pass: cluster minima of the distance matrix under the
    # capture radius, polish on splines, keep sub-match-radius results.
    capture = max(capture_mult * gapsA.max(), 4.0 * match_r)
    close = d2 < capture * capture
    if close.any():
        fA = _periodic_spline(curveA)
        fB = _periodic_spline(curveB)
        htA = float(np.median(np.diff(prA)))
        htB = float(np.median(np.diff(prB)))
        # Seed one refinement per proximity basin: cyclic 3x3 local minima
        # of the distance matrix, visited nearest-first, with a blocked
        # neighborhood grid suppressing rediscovery of the same basin.
        # (Seeding from every close cell is quadratic on curves that run
        # near themselves along whole arcs, e.g. unit-tangent images.)
        nb_min = None
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                if da == 0 and db == 0:
                    continue
                r = np.roll(np.roll(d2, da, axis=0), db, axis=1)
                nb_min = r if nb_min is None else np.minimum(nb_min, r)
        seeds = close & (d2 <= nb_min)
        ii, jj = np.nonzero(seeds)
        order = np.argsort(d2[ii, jj])
        win = 2 * _EXCLUDE_GAPS
        offs = np.arange(-win, win + 1)
        blocked = np.zeros((nA, nB), dtype=bool)
        for k in order:
            i, j = int(ii[k]), int(jj[k])
            if blocked[i, j]:
                continue
            blocked[np.ix_((i + offs) % nA, (j + offs) % nB)] = True
            t, s, d = _refine_pair(
                fA, fB, prA[i], prB[j], 2.0 * htA, 2.0 * htB,
                prA[0], prB[0], curveA.period, curveB.period,
            )
            if d < match_r:
                cands.append((t, s, d))

    # Canonicalize into the fundamental domains, exclude the diagonal, dedupe.
    width = tol.cluster_width(prA, curveA.period)
    final = []
    for t, s, _ in cands:
        t = prA[0] + (t - prA[0]) % curveA.period
        s = prB[0] + (s - prB[0]) % curveB.period
        if self_scan:
            if _cyc_dist(t, s, curveA.period) < exclude_param:
                continue
        if symmetric:
            t, s = min(t, s), max(t, s)
        final.append((t, s))
    final = _dedupe_pairs(final, width, width, curveA.period, curveB.period,
                          symmetric=symmetric)
    return final, False


def coincidence_pairs(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL):
    """Self-coincidences and antipodal coincidences of a closed curve.

    Returns (coincident, antipodal) PairSets: parameter pairs t < s with
    curve(t) = curve(s), respectively curve(t) = -curve(s).  Either count
    becomes the INFINITE sentinel when matches blanket more than the
    degenerate fraction of the samples (e.g. a centrally symmetric curve).
    """
    if not curve.closed:
        raise ValueError("pair detection needs a closed curve")
    pairs, infinite = _pair_scan(curve, curve, tol, self_scan=True)
    coincident = PairSet(
        pairs=sorted(pairs), kind="coincident",
        count=INFINITE if infinite else len(pairs),
    )
    anti_curve = curve.with_points(-curve.points)
    apairs, ainf = _pair_scan(curve, anti_curve, tol, self_scan=True)
    antipodal = PairSet(
        pairs=sorted(apairs), kind="antipodal",
        count=INFINITE if ainf else len(apairs),
    )
    return coincident, antipodal


def parallel_tangent_pairs(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL):
    """Concordant and discordant parallel-tangent pairs of a regular curve,
    computed as coincident / antipodal pairs of its unit-tangent image."""
    from .invariants import tantrix

    T = tantrix(curve, tol)
    concordant, discordant = coincidence_pairs(T, tol)
    concordant.kind = "tangent_concordant"
    discordant.kind = "tangent_discordant"
    return concordant, discordant


def _min_norm_point(points, eps=1e-12, max_iter=200):
    """Wolfe's min-norm-point algorithm on conv(points) in R^d.

    Returns (x, active_indices, weights).  Exact up to floating error;
    terminates when no point improves the support inequality.
    """
    P = np.asarray(points, dtype=float)
    n = len(P)
    scale = max(np.linalg.norm(P, axis=1).max(), 1e-300)
    i0 = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    S = [i0]
    w = np.array([1.0])
    x = P[i0].copy()
    for _ in range(max_iter):
        # most violating vertex
        j = int(np.argmin(P @ x))
        if P[j] @ x > x @ x - eps * scale * scale:
            break
        if j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        # minor cycle: project onto affine hull of S, drop negatives
        while True:
            A = P[S]
            m = len(S)
            G = np.empty((m + 1, m + 1))
            G[:m, :m] = A @ A.T
            G[:m, m] = 1.0
            G[m, :m] = 1.0
            G[m, m] = 0.0
            rhs = np.zeros(m + 1)
            rhs[m] = 1.0
            try:
                sol = np.linalg.solve(G, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(G, rhs, rcond=None)
            v = sol[:m]
            if (v > 1e-14).all():
                w = v
                x = A.T @ w
                break
            # step toward v until a weight hits zero, then drop it
            diff = w - v
            with np.errstate(divide="ignore", invalid="ignore"):
                theta = np.where(diff > 1e-18, w / diff, np.inf)
            th = min(1.0, float(theta.min()))
            w = (1 - th) * w + th * v
            keep = w > 1e-14
            if keep.all():
                keep[int(np.argmin(w))] = False
            S = [S[i] for i in range(m) if keep[i]]
            w = w[keep]
            w = w / w.sum()
            x = P[S].T @ w
    return x, S, w


def _best_hemisphere_direction(points, n_seed=2048, zoom_rounds=6):
    """Maximize min_p <u, p> over unit u (the best closed-hemisphere pole).

    The objective is a minimum of linear functions, so the zoomed grid
    search converges reliably at this scale.  Returns (u, value); a
    negative value of -m means the inscribed ball around the origin has
    radius m, i.e. the origin is interior."""
    P = np.asarray(points, dtype=float)
    # Fibonacci sphere seeds
    i = np.arange(n_seed)
    phi = np.pi * (3.0 - np.sqrt(5.0))
    z = 1.0 - 2.0 * (i + 0.5) / n_seed
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    U = np.column_stack([r * np.cos(phi * i), r * np.sin(phi * i), z])
    vals = (U @ P.T).min(axis=1)
    best = int(np.argmax(vals))
    u = U[best]
    spread = 0.2
    for _ in range(zoom_rounds):
        # local tangent-plane grid around u
        a = np.array([0.0, 0.0, 1.0]) if abs(u[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        e1 = np.cross(a, u)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(u, e1)
        g = np.linspace(-spread, spread, 17)
        X, Y = np.meshgrid(g, g)
        cand = u[None, :] + X.ravel()[:, None] * e1 + Y.ravel()[:, None] * e2
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        cv = (cand @ P.T).min(axis=1)
        b = int(np.argmax(cv))
        u = cand[b]
        spread *= 0.2
    return _polish_pole(P, u)


def _polish_pole(P, u):
    """Active-set refinement of a hemisphere pole candidate.

    At the optimum the active samples lie on a plane <u, .> = value, so a
    plane fit to the near-active set recovers u to machine precision in
    the flat cases (great circles, latitude circles) where the zoomed grid
    alone stalls a few micro-radians short."""
    best_u = u
    best_v = float((P @ u).min())
    for _ in range(3):
        vals = P @ best_u
        cur = vals.min()
        slack = max(1e-9, 4.0 * abs(cur), 1e-4 * (vals.max() - cur))
        act = P[vals <= cur + slack]
        if len(act) < 2:
            break
        m = act.mean(axis=0)
        _, _, Vt = np.linalg.svd(act - m, full_matrices=True)
        improved = False
        for cand in (Vt[-1], -Vt[-1], Vt[-2], -Vt[-2]):
            nv = float((P @ cand).min())
            if nv > best_v:
                best_u, best_v = cand, nv
                improved = True
        if not improved:
            break
    return best_u, best_v


_TETRA = np.array([
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
]) / np.sqrt(3.0)


def _rotation(axis, angle):
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    K = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def _interior_witness(points, eps):
    """Four sample indices whose simplex contains the origin with all
    barycentric weights above eps.  Tries support points of rotated
    tetrahedral direction frames, then seeded random 4-subsets."""
    P = np.asarray(points, dtype=float)
    frames = [np.eye(3)]
    for k in range(1, 24):
        frames.append(_rotation([1.0, 0.7, 0.3 + k], 0.26 * k))
    for R in frames:
        dirs = _TETRA @ R.T
        idx = [int(np.argmax(P @ d)) for d in dirs]
        if len(set(idx)) < 4:
            continue
        w = _barycentric_origin(P[idx])
        if w is not None and (w > eps).all():
            return idx, w
    rng = np.random.default_rng(0)
    n = len(P)
    for _ in range(400):
        idx = sorted(rng.choice(n, size=4, replace=False).tolist())
        w = _barycentric_origin(P[idx])
        if w is not None and (w > eps).all():
            return idx, w
    return None, None


def _barycentric_origin(four):
    M = np.vstack([np.asarray(four, dtype=float).T, np.ones(4)])
    rhs = np.array([0.0, 0.0, 0.0, 1.0])
    try:
        w = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return None
    return w


def origin_in_hull(points, tol: Tolerances = DEFAULT_TOL) -> HullStatus:
    """Classify the origin against the convex hull of a 3-space point set.

    outside   min-norm point of the hull is farther than eps_hull;
              witness = separating unit direction
    interior  an inscribed ball of radius > eps_hull fits around the
              origin; witness = 4 point indices with positive weights
    boundary  everything else; witness = supporting direction
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3:
        raise ValueError("origin_in_hull expects points in R^3")
    scale = max(float(np.linalg.norm(P, axis=1).max()), 1e-300)
    eps = tol.eps_hull * scale
    x, S, w = _min_norm_point(P)
    dist = float(np.linalg.norm(x))
    if dist > eps:
        # every hull point has <x, p> >= |x|^2, so -x/|x| strictly separates
        # the hull from the origin's side
        u = -x / dist
        return HullStatus(status="outside", witness=u, distance=dist, margin=0.0)
    u, val = _best_hemisphere_direction(P)
    # val = max over directions of min support; negative val means every
    # closed hemisphere fails, i.e. the origin is interior with margin -val.
    if val < -eps:
        idx, bw = _interior_witness(P, tol.eps_hull)
        if idx is not None:
            return HullStatus(status="interior", witness=idx, distance=dist, margin=-val)
        return HullStatus(status="interior", witness=S, distance=dist, margin=-val)
    return HullStatus(status="boundary", witness=u, distance=dist, margin=-val)


def hemisphere_pole(curve_or_points, tol: Tolerances = DEFAULT_TOL):
    """Unit vector u with <u, p> >= -eps_hull for every sample, or None.

    Such a pole exists exactly when the origin is not interior to the
    sample hull; the search maximizes the worst inner product.
    """
    if isinstance(curve_or_points, SampledCurve):
        P = curve_or_points.points
    else:
        P = np.asarray(curve_or_points, dtype=float)
    scale = max(float(np.linalg.norm(P, axis=1).max()), 1e-300)
    u, val = _best_hemisphere_direction(P)
    if val >= -tol.eps_hull * scale:
        return u
    return None


def _geodesic_turning(points):
    """Signed exterior angles of the closed geodesic polygon through the
    sample points, summed.  Exact discrete Gauss-Bonnet input."""
    P = np.asarray(points, dtype=float)
    B = np.roll(P, -1, axis=0)
    dots = np.clip(np.einsum("ij,ij->i", P, B), -1.0, 1.0)
    # departing tangent of edge i at its start, arriving tangent at its end
    E = B - dots[:, None] * P
    En = np.linalg.norm(E, axis=1)
    ok = En > 1e-300
    E = E / np.where(ok, En, 1.0)[:, None]
    # arriving direction at B along the edge: differentiate the great circle
    Arr = -np.sin(np.arccos(dots))[:, None] * P + np.cos(np.arccos(dots))[:, None] * E
    arr_prev = np.roll(Arr, 1, axis=0)
    dep = E
    cosang = np.clip(np.einsum("ij,ij->i", arr_prev, dep), -1.0, 1.0)
    sinang = np.einsum("ij,ij->i", P, np.cross(arr_prev, dep))
    return float(np.arctan2(sinang, cosang).sum())


def enclosed_area(curve: SampledCurve, tol: Tolerances = DEFAULT_TOL,
                  assume_simple=False) -> AreaResult:
    """Areas of the two sides of a simple closed spherical curve.

    The left area (region to the left of the traversal) comes from the
    exact discrete Gauss-Bonnet identity for geodesic polygons:
    area = 2 pi - total turning.  left + right = 4 pi identically.
    """
    if curve.ambient != "sphere":
        raise ValueError("enclosed_area needs a sphere curve")
    if not assume_simple:
        coincident, _ = coincidence_pairs(curve, tol)
        if coincident.count != 0:
            raise NotSimple("curve has self-intersections")
    turning = _geodesic_turning(curve.points)
    left = 2.0 * np.pi - turning
    left = left % (4.0 * np.pi)
    right = 4.0 * np.pi - left
    return AreaResult(left=left, right=right, bisects=abs(left - 2.0 * np.pi) < tol.bisect_tol)

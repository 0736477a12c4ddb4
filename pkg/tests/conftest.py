"""Shared curve builders and independent oracles.

The oracles here deliberately avoid the package's own machinery: pair
detection is redone on the sample polygon with gnomonic projection and
dense grid polish, hull membership by exhaustive Caratheodory subsets,
and spherical area by an angle-excess fan.  They are slow and simple on
purpose so the fast implementations have something honest to disagree
with.
"""

import numpy as np
import pytest

from tantrix.geom import SampledCurve, Tolerances

DEFAULT_TOL = Tolerances()

# same diagonal window the package uses when a curve is scanned against
# itself: pairs closer than this many samples along the curve are the
# curve meeting itself trivially, not a double point
EXCLUDE_GAPS = 4


@pytest.fixture
def tol():
    return Tolerances()


# ---------------------------------------------------------------------------
# curve builders


def latitude_circle(colat, n=256, phase=0.0):
    """Circle of constant colatitude on the unit sphere."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    s, c = np.sin(colat), np.cos(colat)
    pts = np.stack([s * np.cos(t + phase), s * np.sin(t + phase),
                    np.full(n, c)], axis=1)
    return SampledCurve(pts, t, ambient="sphere")


def plane_ellipse(a=2.0, b=1.0, n=256):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack([a * np.cos(t), b * np.sin(t)], axis=1)
    return SampledCurve(pts, t, ambient="plane")


def plane_lemniscate(n=512, scale=1.0):
    """Figure eight in the plane with one transversal crossing."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = scale * np.stack([np.cos(t), np.sin(t) * np.cos(t)], axis=1)
    return SampledCurve(pts, t, ambient="plane")


def sphere_figure_eight(n=512):
    """Spherical curve with exactly one transversal self-crossing."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    raw = np.stack([np.cos(t), np.sin(t) * np.cos(t), np.ones(n)], axis=1)
    pts = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    return SampledCurve(pts, t, ambient="sphere")


def tennis_ball(n=512, amp=0.4, freq=2):
    """Simple wavy equatorial curve (colatitude graph over longitude)."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    colat = np.pi / 2 + amp * np.sin(freq * t)
    pts = np.stack([np.sin(colat) * np.cos(t), np.sin(colat) * np.sin(t),
                    np.cos(colat)], axis=1)
    return SampledCurve(pts, t, ambient="sphere")


def space_trefoil(n=512):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack([np.sin(t) + 2.0 * np.sin(2.0 * t),
                    np.cos(t) - 2.0 * np.cos(2.0 * t),
                    -np.sin(3.0 * t)], axis=1)
    return SampledCurve(pts, t, ambient="space")


def helix_loop(n=512, r=1.0, wobble=0.2):
    """Closed space curve with nowhere-vanishing curvature and torsion."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack([r * np.cos(t), r * np.sin(t),
                    wobble * np.sin(3.0 * t)], axis=1)
    return SampledCurve(pts, t, ambient="space")


# ---------------------------------------------------------------------------
# pair oracle


def _cross_fractions_2d(p0, p1, q0, q1):
    """Batched chord-chord crossing: arrays (k, 2) in, (u, v, hit) out."""
    r = p1 - p0
    s = q1 - q0
    den = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    safe = np.where(np.abs(den) < 1e-15, 1.0, den)
    w = q0 - p0
    u = (w[:, 0] * s[:, 1] - w[:, 1] * s[:, 0]) / safe
    v = (w[:, 0] * r[:, 1] - w[:, 1] * r[:, 0]) / safe
    hit = (np.abs(den) >= 1e-15) & (u >= 0.0) & (u < 1.0) & (v >= 0.0) & (v < 1.0)
    return u, v, hit


def _cross_fractions_gnomonic(p0, p1, q0, q1):
    """Crossing test for chord batches on the sphere, each pair projected to
    the tangent plane at its own local centroid."""
    m = p0 + p1 + q0 + q1
    nm = np.linalg.norm(m, axis=1, keepdims=True)
    ok = nm[:, 0] > 1e-12
    m = m / np.where(nm > 0, nm, 1.0)
    a = np.where(np.abs(m[:, :1]) < 0.9,
                 np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    e1 = np.cross(m, a)
    e1 = e1 / np.maximum(np.linalg.norm(e1, axis=1, keepdims=True), 1e-300)
    e2 = np.cross(m, e1)
    flats = []
    for p in (p0, p1, q0, q1):
        den = np.einsum("ij,ij->i", p, m)
        ok &= den > 1e-9
        den = np.where(den > 0, den, 1.0)
        flats.append(np.stack([np.einsum("ij,ij->i", p, e1) / den,
                               np.einsum("ij,ij->i", p, e2) / den], axis=1))
    u, v, hit = _cross_fractions_2d(*flats)
    return u, v, hit & ok


def _polish_min(A0, A1, B0, B1, grid=48):
    """Minimum distance between two chords by brute grid evaluation."""
    u = np.linspace(0.0, 1.0, grid)
    pa = A0[None, :] + u[:, None] * (A1 - A0)[None, :]
    pb = B0[None, :] + u[:, None] * (B1 - B0)[None, :]
    d = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
    k = int(np.argmin(d))
    i, j = divmod(k, grid)
    return float(u[i]), float(u[j]), float(d[i, j])


def _cyc(a, b, period):
    d = abs(a - b) % period
    return min(d, period - d)


def oracle_pairs(curve, other_points=None, exclude_diag=True,
                 tol=DEFAULT_TOL):
    """O(n^2) reference pair detection on the sample polygon.

    Scans every admissible segment pair for transversal crossings
    (gnomonic orientation test for sphere curves, plain 2-d signs in the
    plane) and for proximity minima (dense chord-grid polish), then
    clusters hits that describe the same contact.  Returns a sorted list
    of (t, s) parameter pairs with t <= s.  When ``other_points`` is
    given the second family of segments is taken from it instead (used
    for the antipodal scan with -P), and the diagonal exclusion only
    applies when requested.
    """
    P = curve.points
    n = curve.n
    period = curve.period
    prm = curve.params
    Q = P if other_points is None else np.asarray(other_points, dtype=float)
    match_r = tol.match_radius(curve.diameter())
    seg_len = np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1)
    capture = 3.0 * float(seg_len.max())
    width = tol.cluster_width(prm, period)

    def param_at(i, frac):
        nxt = prm[i + 1] if i + 1 < n else prm[0] + period
        t = prm[i] + frac * (nxt - prm[i])
        return prm[0] + (t - prm[0]) % period

    if other_points is None:
        II, JJ = np.triu_indices(n, k=1)
    else:
        II, JJ = np.nonzero(np.ones((n, n), dtype=bool))
    if exclude_diag:
        idx_gap = np.minimum(np.abs(II - JJ), n - np.abs(II - JJ))
        keep = idx_gap > EXCLUDE_GAPS
        II, JJ = II[keep], JJ[keep]

    A0, A1 = P[II], P[(II + 1) % n]
    B0, B1 = Q[JJ], Q[(JJ + 1) % n]
    if curve.dim == 2:
        u, v, hit = _cross_fractions_2d(A0, A1, B0, B1)
    else:
        u, v, hit = _cross_fractions_gnomonic(A0, A1, B0, B1)

    hits = []
    for k in np.nonzero(hit)[0]:
        hits.append((param_at(int(II[k]), float(u[k])),
                     param_at(int(JJ[k]), float(v[k]))))

    gap = np.linalg.norm(0.5 * (A0 + A1) - 0.5 * (B0 + B1), axis=1)
    near = np.nonzero(~hit & (gap < capture))[0]
    for k in near:
        uu, vv, d = _polish_min(A0[k], A1[k], B0[k], B1[k])
        if d < match_r:
            hits.append((param_at(int(II[k]), uu), param_at(int(JJ[k]), vv)))

    canon = []
    for t, s in hits:
        if other_points is None and _cyc(t, s, period) <= EXCLUDE_GAPS * (period / n):
            continue
        a, b = (t, s) if t <= s else (s, t)
        for k, (ca, cb) in enumerate(canon):
            near = (_cyc(a, ca, period) < 3 * width and _cyc(b, cb, period) < 3 * width)
            swapped = (other_points is None and _cyc(a, cb, period) < 3 * width
                       and _cyc(b, ca, period) < 3 * width)
            if near or swapped:
                break
        else:
            canon.append((a, b))
    return sorted(canon)


# ---------------------------------------------------------------------------
# hull oracle


def oracle_origin_in_hull(points, slack=1e-9):
    """Exhaustive Caratheodory membership test in R^3.

    The origin lies in conv(points) iff some subset of at most four
    points already contains it.  Tries all singles, pairs, triples and
    nondegenerate quadruples; degenerate subsets are covered by the
    smaller sizes.
    """
    P = np.asarray(points, dtype=float)
    m = len(P)
    scale = float(np.abs(P).max()) or 1.0
    eps = slack * scale

    if (np.linalg.norm(P, axis=1) <= eps).any():
        return True

    ii, jj = np.triu_indices(m, k=1)
    A, B = P[ii], P[jj]
    d = B - A
    den = np.einsum("ij,ij->i", d, d)
    den = np.where(den == 0.0, 1.0, den)
    tt = np.clip(-np.einsum("ij,ij->i", A, d) / den, 0.0, 1.0)
    closest = A + tt[:, None] * d
    if (np.linalg.norm(closest, axis=1) <= eps).any():
        return True

    from itertools import combinations

    tri = np.array(list(combinations(range(m), 3)))
    T = P[tri]                      # (k, 3, 3) rows are the points
    M = np.swapaxes(T, 1, 2)        # columns are the points
    ones = np.ones((len(tri), 1, 3))
    Asys = np.concatenate([M, ones], axis=1)          # (k, 4, 3)
    rhs = np.zeros((len(tri), 4))
    rhs[:, 3] = 1.0
    AtA = np.einsum("kij,kil->kjl", Asys, Asys)
    Atb = np.einsum("kij,ki->kj", Asys, rhs)
    ok = np.abs(np.linalg.det(AtA)) > 1e-18 * scale**4
    if ok.any():
        lam = np.linalg.solve(AtA[ok], Atb[ok][..., None])[..., 0]
        res = np.einsum("kij,kj->ki", Asys[ok], lam) - rhs[ok]
        good = (np.linalg.norm(res, axis=1) <= eps) & (lam.min(axis=1) >= -slack)
        if good.any():
            return True

    quad = np.array(list(combinations(range(m), 4)))
    QQ = P[quad]
    M4 = np.swapaxes(QQ, 1, 2)
    ones4 = np.ones((len(quad), 1, 4))
    Asys4 = np.concatenate([M4, ones4], axis=1)       # (k, 4, 4)
    det = np.linalg.det(Asys4)
    ok4 = np.abs(det) > 1e-15 * scale**3
    if ok4.any():
        rhs4 = np.zeros((int(ok4.sum()), 4, 1))
        rhs4[:, 3, 0] = 1.0
        lam = np.linalg.solve(Asys4[ok4], rhs4)[..., 0]
        if (lam.min(axis=1) >= -slack).any():
            return True
    return False


# ---------------------------------------------------------------------------
# spherical area oracle


def oracle_spherical_area(points):
    """Enclosed area of a closed spherical polygon by the angle-excess fan,
    reduced to [0, 4 pi).  The sign convention matches an area integral of
    the region to the left of the traversal."""
    P = np.asarray(points, dtype=float)
    p0 = P[0]
    total = 0.0
    for i in range(1, len(P) - 1):
        p1, p2 = P[i], P[i + 1]
        num = float(np.dot(p0, np.cross(p1, p2)))
        den = 1.0 + float(p0 @ p1 + p1 @ p2 + p2 @ p0)
        total += 2.0 * np.arctan2(num, den)
    return total % (4.0 * np.pi)


def random_rotation(seed):
    """Uniform random rotation matrix (QR of a Gaussian draw, det +1)."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q

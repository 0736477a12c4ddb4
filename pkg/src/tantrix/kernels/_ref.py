"""Reference stepping kernel: pure numpy, same scheme as the compiled one.

The kernel advances a closed polyline on the unit sphere by explicit Euler
steps of curve shortening, p <- p + dt * <gamma_ss, n> n with n = p x T,
renormalizing to the sphere after every step.  Derivatives are taken with
respect to arc length through the chord gaps, so mild nonuniformity from
tangential drift between resamplings is handled correctly.

All updates within one step read the previous step's points (Jacobi style),
matching the compiled kernel's buffering.
"""

import numpy as np


def csf_advance(points, cfl, steps, max_time=np.inf):
    """Run up to ``steps`` curve shortening steps on a closed spherical
    polyline.

    Each step uses dt = cfl * (min chord gap)^2, shortened if needed so the
    accumulated time never exceeds ``max_time``.

    Returns ``(points, elapsed, steps_done, k_max)`` where ``k_max`` is the
    largest |geodesic curvature| sample seen over the run (infinity when the
    polyline degenerates).
    """
    p = np.array(points, dtype=float)
    elapsed = 0.0
    kmax = 0.0
    done = 0
    for _ in range(int(steps)):
        nxt = np.roll(p, -1, axis=0)
        prv = np.roll(p, 1, axis=0)
        hf = np.linalg.norm(nxt - p, axis=1)
        hb = np.roll(hf, 1)
        m = hf.min()
        if not (m > 0.0 and np.isfinite(m)):
            return p, elapsed, done, np.inf
        dt = cfl * m * m
        if elapsed + dt > max_time:
            dt = max_time - elapsed
            if dt <= 0.0:
                break
        gss = (2.0 / (hb + hf))[:, None] * (
            (nxt - p) / hf[:, None] - (p - prv) / hb[:, None]
        )
        T = nxt - prv
        tn = np.linalg.norm(T, axis=1)
        if not (tn.min() > 0.0):
            return p, elapsed, done, np.inf
        T = T / tn[:, None]
        nor = np.cross(p, T)
        nn = np.linalg.norm(nor, axis=1)
        if not (nn.min() > 0.0):
            return p, elapsed, done, np.inf
        nor = nor / nn[:, None]
        k = np.einsum("ij,ij->i", gss, nor)
        km = float(np.abs(k).max())
        if km > kmax:
            kmax = km
        p = p + (dt * k)[:, None] * nor
        p = p / np.linalg.norm(p, axis=1)[:, None]
        elapsed += dt
        done += 1
        if elapsed >= max_time:
            break
    return p, elapsed, done, kmax

# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled stepping kernel for curve shortening on the sphere.

Mirrors kernels._ref.csf_advance step for step; the flow driver picks
whichever is importable.
"""

from libc.math cimport sqrt, INFINITY

import numpy as np


def csf_advance(points, double cfl, Py_ssize_t steps, double max_time=INFINITY):
    """Run up to ``steps`` curve shortening steps on a closed spherical
    polyline.  See kernels._ref.csf_advance for the contract."""
    p_arr = np.array(points, dtype=np.float64, order="C")
    if p_arr.ndim != 2 or p_arr.shape[1] != 3:
        raise ValueError("expected an (n, 3) point array")
    cdef double[:, ::1] p = p_arr
    cdef Py_ssize_t n = p.shape[0]
    q_arr = np.empty_like(p_arr)
    cdef double[:, ::1] q = q_arr
    h_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] h = h_arr

    cdef double elapsed = 0.0
    cdef double kmax = 0.0
    cdef Py_ssize_t done = 0
    cdef Py_ssize_t step, i, ip, im, j
    cdef double m, dt, hf, hb, w, gx, gy, gz, tx, ty, tz, tn
    cdef double nx, ny, nz, nn, k, ak, px, py, pz, pn
    cdef bint bad

    for step in range(steps):
        m = INFINITY
        bad = False
        for i in range(n):
            ip = i + 1
            if ip == n:
                ip = 0
            gx = p[ip, 0] - p[i, 0]
            gy = p[ip, 1] - p[i, 1]
            gz = p[ip, 2] - p[i, 2]
            hf = sqrt(gx * gx + gy * gy + gz * gz)
            h[i] = hf
            if hf < m:
                m = hf
        if not (m > 0.0 and m != INFINITY and m == m):
            return p_arr, elapsed, done, INFINITY
        dt = cfl * m * m
        if elapsed + dt > max_time:
            dt = max_time - elapsed
            if dt <= 0.0:
                break
        for i in range(n):
            ip = i + 1
            if ip == n:
                ip = 0
            im = i - 1
            if im < 0:
                im = n - 1
            hf = h[i]
            hb = h[im]
            w = 2.0 / (hb + hf)
            gx = w * ((p[ip, 0] - p[i, 0]) / hf - (p[i, 0] - p[im, 0]) / hb)
            gy = w * ((p[ip, 1] - p[i, 1]) / hf - (p[i, 1] - p[im, 1]) / hb)
            gz = w * ((p[ip, 2] - p[i, 2]) / hf - (p[i, 2] - p[im, 2]) / hb)
            tx = p[ip, 0] - p[im, 0]
            ty = p[ip, 1] - p[im, 1]
            tz = p[ip, 2] - p[im, 2]
            tn = sqrt(tx * tx + ty * ty + tz * tz)
            if not tn > 0.0:
                bad = True
                break
            tx /= tn
            ty /= tn
            tz /= tn
            nx = p[i, 1] * tz - p[i, 2] * ty
            ny = p[i, 2] * tx - p[i, 0] * tz
            nz = p[i, 0] * ty - p[i, 1] * tx
            nn = sqrt(nx * nx + ny * ny + nz * nz)
            if not nn > 0.0:
                bad = True
                break
            nx /= nn
            ny /= nn
            nz /= nn
            k = gx * nx + gy * ny + gz * nz
            ak = k if k >= 0.0 else -k
            if ak > kmax:
                kmax = ak
            px = p[i, 0] + dt * k * nx
            py = p[i, 1] + dt * k * ny
            pz = p[i, 2] + dt * k * nz
            pn = sqrt(px * px + py * py + pz * pz)
            q[i, 0] = px / pn
            q[i, 1] = py / pn
            q[i, 2] = pz / pn
        if bad:
            return p_arr, elapsed, done, INFINITY
        for i in range(n):
            for j in range(3):
                p[i, j] = q[i, j]
        elapsed += dt
        done += 1
        if elapsed >= max_time:
            break
    return p_arr, elapsed, done, kmax

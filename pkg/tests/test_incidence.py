"""Pair detection, hull membership, hemisphere poles and enclosed areas,
checked against the brute-force oracles in conftest."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tantrix.errors import NotSimple
from tantrix.geom import SampledCurve, Tolerances
from tantrix.incidence import (
    coincidence_pairs,
    enclosed_area,
    hemisphere_pole,
    origin_in_hull,
    parallel_tangent_pairs,
)
from tantrix.invariants import INFINITE
from tantrix.synthesis import random_fourier_loop

from conftest import (
    helix_loop,
    latitude_circle,
    oracle_origin_in_hull,
    oracle_pairs,
    oracle_spherical_area,
    plane_ellipse,
    plane_lemniscate,
    sphere_figure_eight,
    tennis_ball,
)


def _pairs_match(got, expected, period, width):
    """Each detected pair must sit within a cluster width of an oracle pair
    (in either coordinate order) and vice versa."""
    def cyc(a, b):
        d = abs(a - b) % period
        return min(d, period - d)

    if len(got) != len(expected):
        return False
    for t, s in got:
        if not any(
            (cyc(t, a) < width and cyc(s, b) < width)
            or (cyc(t, b) < width and cyc(s, a) < width)
            for a, b in expected
        ):
            return False
    return True


class TestCoincidencePairs:
    def test_single_crossing_curves(self, tol):
        for c in (sphere_figure_eight(320), plane_lemniscate(320)):
            co, _ = coincidence_pairs(c, tol)
            want = oracle_pairs(c, tol=tol)
            width = tol.cluster_width(c.params, c.period)
            assert co.count == 1
            assert _pairs_match(co.pairs, want, c.period, 3 * width)

    def test_simple_curve_has_none(self, tol):
        co, an = coincidence_pairs(tennis_ball(320), tol)
        assert co.count == 0
        assert an.count == 2

    def test_antipodal_pairs_located(self, tol):
        c = tennis_ball(320)
        _, an = coincidence_pairs(c, tol)
        want = oracle_pairs(c, other_points=-c.points, exclude_diag=False, tol=tol)
        width = tol.cluster_width(c.params, c.period)
        assert _pairs_match(an.pairs, want, c.period, 3 * width)

    def test_centrally_symmetric_curve_saturates(self, tol):
        _, an = coincidence_pairs(helix_loop(320), tol)
        assert an.count == INFINITE
        assert an.pairs == []

    def test_great_circle_antipodal_continuum(self, tol):
        _, an = coincidence_pairs(latitude_circle(np.pi / 2, 256), tol)
        assert an.count == INFINITE

    def test_kind_labels(self, tol):
        co, an = coincidence_pairs(sphere_figure_eight(256), tol)
        assert co.kind == "coincident"
        assert an.kind == "antipodal"


class TestParallelTangents:
    def test_wavy_curve(self, tol):
        conc, disc = parallel_tangent_pairs(tennis_ball(320), tol)
        assert conc.kind == "tangent_concordant"
        assert disc.kind == "tangent_discordant"
        assert conc.count + disc.count == 2

    def test_convex_plane_loop_has_no_concordant(self, tol):
        conc, _ = parallel_tangent_pairs(plane_ellipse(2.0, 1.0, 320), tol)
        assert conc.count == 0


class TestOriginInHull:
    def test_octahedron_interior(self, tol):
        pts = np.array([[1.0, 0, 0], [-1, 0, 0], [0, 1, 0],
                        [0, -1, 0], [0, 0, 1], [0, 0, -1]])
        h = origin_in_hull(pts, tol)
        assert h.status == "interior"
        assert h.margin > 0.5

    def test_cap_cloud_outside(self, tol):
        rng = np.random.default_rng(5)
        pts = rng.normal(size=(40, 3))
        pts[:, 2] = np.abs(pts[:, 2]) + 0.5
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        h = origin_in_hull(pts, tol)
        assert h.status == "outside"
        assert not oracle_origin_in_hull(pts)

    def test_equatorial_ring_is_boundary(self, tol):
        h = origin_in_hull(latitude_circle(np.pi / 2, 64).points, tol)
        assert h.status == "boundary"
        assert oracle_origin_in_hull(latitude_circle(np.pi / 2, 64).points)

    def test_interior_witness_is_a_certificate(self, tol):
        c = tennis_ball(200)
        h = origin_in_hull(c.points, tol)
        assert h.status == "interior"
        w = np.atleast_2d(np.asarray(h.witness, dtype=float))
        if w.shape[1] == 3 and len(w) >= 1:
            assert oracle_origin_in_hull(c.points)


class TestHemispherePole:
    def test_cap_curve_has_pole(self, tol):
        u = hemisphere_pole(latitude_circle(np.pi / 3, 128), tol)
        assert u is not None
        assert (latitude_circle(np.pi / 3, 128).points @ u).min() > 0

    def test_hull_interior_curve_has_none(self, tol):
        assert hemisphere_pole(tennis_ball(128), tol) is None

    def test_accepts_raw_points(self, tol):
        pts = latitude_circle(1.1, 64).points
        u = hemisphere_pole(pts, tol)
        assert u is not None and (pts @ u).min() > 0


class TestEnclosedArea:
    def test_cap_areas(self, tol):
        colat = np.pi / 3
        ar = enclosed_area(latitude_circle(colat, 512), tol)
        cap = 2.0 * np.pi * (1.0 - np.cos(colat))
        assert ar.left == pytest.approx(cap, abs=1e-3)
        assert ar.left + ar.right == pytest.approx(4.0 * np.pi, abs=1e-12)
        assert not ar.bisects

    def test_matches_fan_oracle(self, tol):
        for colat in (0.6, np.pi / 2, 2.2):
            c = latitude_circle(colat, 512)
            ar = enclosed_area(c, tol)
            fan = oracle_spherical_area(c.points)
            assert ar.left == pytest.approx(fan, abs=1e-3)

    def test_bisecting_flag(self, tol):
        assert enclosed_area(tennis_ball(512), tol).bisects
        assert enclosed_area(latitude_circle(np.pi / 2, 512), tol).bisects

    def test_needs_simple_curve(self, tol):
        with pytest.raises(NotSimple):
            enclosed_area(sphere_figure_eight(512), tol)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=5_000))
def test_pair_scan_matches_oracle_on_random_loops(seed):
    """Unpruned quadratic scan and the fast detector agree pair for pair."""
    tol = Tolerances()
    c = random_fourier_loop(seed, degree=3, ambient="sphere", n=256, tol=tol)
    co, an = coincidence_pairs(c, tol)
    width = 3 * tol.cluster_width(c.params, c.period)
    if co.count != INFINITE:
        want = oracle_pairs(c, tol=tol)
        assert _pairs_match(co.pairs, want, c.period, width)
    if an.count != INFINITE:
        want = oracle_pairs(c, other_points=-c.points, exclude_diag=False, tol=tol)
        assert _pairs_match(an.pairs, want, c.period, width)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=5_000),
       m=st.integers(min_value=8, max_value=40))
def test_hull_matches_exhaustive_oracle(seed, m):
    """Fast membership agrees with trying every Caratheodory subset."""
    tol = Tolerances()
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(m, 3))
    if seed % 2:
        pts[:, 2] = np.abs(pts[:, 2]) + rng.uniform(0.0, 0.4)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    h = origin_in_hull(pts, tol)
    contained = oracle_origin_in_hull(pts)
    if h.status == "interior":
        assert contained
    elif h.status == "outside":
        assert not contained


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(min_value=0, max_value=5_000))
def test_area_sides_partition_the_sphere(seed):
    tol = Tolerances()
    c = random_fourier_loop(seed, degree=3, ambient="sphere",
                            constraints=["simple"], n=256, tol=tol)
    ar = enclosed_area(c, tol)
    assert ar.left + ar.right == pytest.approx(4.0 * np.pi, abs=1e-9)
    assert ar.left == pytest.approx(oracle_spherical_area(c.points), abs=5e-3)

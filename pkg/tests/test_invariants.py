"""Counting machinery: sign changes, cusps, inflections, vertices, reports."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tantrix.errors import SingularCurve
from tantrix.geom import SampledCurve, ScalarField, Tolerances
from tantrix.invariants import (
    DEGENERATE,
    INFINITE,
    count_inflections,
    count_sign_changes,
    count_zero_clusters,
    frenet,
    geodesic_curvature,
    invariant_report,
    is_finite_count,
    singular_points,
    tantrix,
)

from conftest import (
    helix_loop,
    latitude_circle,
    plane_ellipse,
    plane_lemniscate,
    random_rotation,
    space_trefoil,
    sphere_figure_eight,
    tennis_ball,
)


def deltoid(n=512):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack([2 * np.cos(t) + np.cos(2 * t),
                    2 * np.sin(t) - np.sin(2 * t)], axis=1)
    return SampledCurve(pts, t, ambient="plane")


class TestSignCounting:
    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_planted_sign_changes(self, k, tol):
        t = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        f = ScalarField(np.sin(k * t), t)
        assert count_sign_changes(f, tol).count == 2 * k

    def test_positive_field_has_none(self, tol):
        t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        f = ScalarField(2.0 + np.sin(3 * t), t)
        assert count_sign_changes(f, tol).count == 0

    def test_cancellation_noise_reads_degenerate(self, tol):
        # values at rounding level of the producing expression, scale given
        t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        rng = np.random.default_rng(3)
        f = ScalarField(1e-14 * rng.normal(size=256), t, scale=1.0)
        assert count_sign_changes(f, tol).count == DEGENERATE

    def test_touch_without_crossing_is_not_genuine(self, tol):
        t = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        f = ScalarField(1.0 - np.cos(t), t)  # grazes zero at t = 0
        res = count_sign_changes(f, tol)
        assert res.count >= res.genuine_count
        assert res.genuine_count == 0

    def test_zero_clusters_on_planted_dips(self, tol):
        t = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        f = ScalarField(np.abs(np.sin(2 * t)), t)
        assert count_zero_clusters(f, tol).count == 4


class TestSingularPoints:
    def test_deltoid_has_three_cusps(self, tol):
        S = singular_points(deltoid(), tol)
        assert S.count == 3
        assert S.kinds == ("touch",) * 3
        assert len(S.locations) == 3
        # cusps of the deltoid sit at t = 0, 2 pi / 3, 4 pi / 3
        expected = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
        assert np.abs(np.sort(S.locations) - expected).max() < 0.05

    def test_regular_curves_have_none(self, tol):
        assert singular_points(plane_ellipse(), tol).count == 0
        assert singular_points(tennis_ball(), tol).count == 0

    def test_tantrix_refuses_singular_curve(self, tol):
        with pytest.raises(SingularCurve):
            tantrix(deltoid(), tol)


class TestTantrix:
    def test_plane_curve_tantrix_traces_equator(self, tol):
        T = tantrix(plane_ellipse(), tol)
        assert T.ambient == "sphere"
        assert np.abs(T.points[:, 2]).max() < 1e-12
        assert np.abs(np.linalg.norm(T.points, axis=1) - 1.0).max() < 1e-9

    def test_space_inflections_are_tantrix_cusps(self, tol):
        # a curve whose tangent grazes a plane: x'(t) = 0 twice
        t = np.linspace(0.0, 2.0 * np.pi, 1024, endpoint=False)
        pts = np.stack([np.cos(t), np.sin(t), 0.0 * t], axis=1)
        pts[:, 2] = 0.3 * np.sin(2 * t)
        c = SampledCurve(pts, t, ambient="space")
        I = count_inflections(c, tol)
        T = tantrix(c, tol)
        S_T = singular_points(T, tol)
        assert I.count == S_T.count


class TestGeodesicCurvature:
    def test_latitude_circle_constant(self, tol):
        colat = np.pi / 3
        kg = geodesic_curvature(latitude_circle(colat, 512), tol)
        assert np.abs(kg.values - 1.0 / np.tan(colat)).max() < 1e-4

    def test_great_circle_zero(self, tol):
        kg = geodesic_curvature(latitude_circle(np.pi / 2, 512), tol)
        assert np.abs(kg.values).max() < 1e-9


class TestFrenet:
    def test_frame_orthonormal_where_defined(self, tol):
        fr = frenet(helix_loop(512), tol)
        assert fr.defined.all()
        assert np.abs(np.einsum("ij,ij->i", fr.T, fr.N)).max() < 1e-8
        assert np.abs(np.linalg.norm(fr.B, axis=1) - 1.0).max() < 1e-8
        assert fr.kappa.min() > 0

    def test_planar_space_curve_has_zero_torsion(self, tol):
        t = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        pts = np.stack([2 * np.cos(t), np.sin(t), np.sin(t)], axis=1)
        fr = frenet(SampledCurve(pts, t, ambient="space"), tol)
        assert np.abs(fr.tau[fr.defined]).max() < 1e-8

    def test_undefined_on_straight_stretch(self, tol):
        # circle with one arc flattened onto its chord: curvature vanishes
        # identically there, so the frame is undefined on that window
        def smooth(u):
            u = np.clip(u, 0.0, 1.0)
            return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)

        t = np.linspace(0.0, 2.0 * np.pi, 1024, endpoint=False)
        plateau = smooth((t - 1.0) / 0.2) * smooth((1.8 - t) / 0.2)
        pts = np.stack([np.cos(t), (1.0 - plateau) * np.sin(t),
                        np.zeros_like(t)], axis=1)
        fr = frenet(SampledCurve(pts, t, ambient="space"), tol)
        flat = (t > 1.25) & (t < 1.55)
        assert not fr.defined[flat].any()
        assert fr.defined[(t < 0.8) | (t > 2.0)].all()


class TestReports:
    def test_ellipse(self, tol):
        r = invariant_report(plane_ellipse(2.0, 1.0, 512), tol)
        assert r.D_plus.count == 0
        assert r.S.count == 0
        assert r.I.count == 0
        assert r.curvature_extrema.count == 4
        # the centered ellipse is its own point reflection
        assert r.antipodal.count == INFINITE
        assert r.V.count == DEGENERATE

    def test_plane_figure_eight(self, tol):
        r = invariant_report(plane_lemniscate(512), tol)
        assert r.D_plus.count == 1
        assert r.I.count == 2
        assert r.sigma_plus == 4
        assert r.curvature_extrema.count == 6

    def test_spherical_figure_eight(self, tol):
        r = invariant_report(sphere_figure_eight(512), tol)
        assert r.D_plus.count == 1
        assert r.antipodal.count == 0
        assert r.D.count == 1
        assert r.S.count == 0
        assert r.I.count == 2
        assert r.sigma == 2 * (1 + 0) + 2
        assert r.hull_status == "outside"

    def test_wavy_equatorial_curve(self, tol):
        r = invariant_report(tennis_ball(512), tol)
        assert r.D_plus.count == 0
        assert r.antipodal.count == 2
        assert r.D.count == 2
        assert r.I.count == 4
        assert r.V.count == 4
        assert r.P.count == 2
        assert r.hull_status == "interior"
        assert r.sigma == 2 * (2 + 0) + 4
        assert r.sigma_plus == 2 * (0 + 0) + 4

    def test_embedded_space_knot(self, tol):
        r = invariant_report(space_trefoil(512), tol)
        assert r.D_plus.count == 0
        assert r.I.count == 0
        assert r.V.count == 6
        assert r.P.count == 9
        assert r.P_plus.count == 3

    def test_centrally_symmetric_loop_saturates(self, tol):
        r = invariant_report(helix_loop(512), tol)
        assert r.antipodal.count == INFINITE
        assert r.P.count == INFINITE
        assert r.sigma == INFINITE
        assert r.sigma_plus == 0

    def test_count_result_internal_consistency(self, tol):
        for c in (tennis_ball(400), sphere_figure_eight(400)):
            r = invariant_report(c, tol)
            for cr in (r.D_plus, r.antipodal, r.S, r.I, r.V):
                if not is_finite_count(cr.count):
                    continue
                assert cr.genuine_count <= cr.count
                assert len(cr.locations) == cr.count
                assert np.all(np.diff(cr.locations) >= 0)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_counts_are_rotation_invariant(seed):
    """Rigid rotations preserve every counted invariant of a sphere curve."""
    tol = Tolerances()
    base = tennis_ball(384)
    R = random_rotation(seed)
    rot = base.with_points(base.points @ R.T)
    a, b = invariant_report(base, tol), invariant_report(rot, tol)
    assert (a.D.count, a.S.count, a.I.count, a.V.count, a.P.count) == \
           (b.D.count, b.S.count, b.I.count, b.V.count, b.P.count)
    assert a.hull_status == b.hull_status


@settings(max_examples=8, deadline=None)
@given(n=st.sampled_from([300, 384, 512, 640]))
def test_counts_survive_resampling_density(n):
    tol = Tolerances()
    r = invariant_report(tennis_ball(n), tol)
    assert (r.D.count, r.I.count, r.V.count) == (2, 4, 4)

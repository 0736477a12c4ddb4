"""Sampled-curve plumbing: validation, resampling, derivatives, projections."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tantrix.errors import NotInHemisphere, PoleOnCurve
from tantrix.geom import (
    SampledCurve,
    ScalarField,
    Tolerances,
    beltrami_project,
    beltrami_unproject,
    differentiate,
    gauss_bonnet_residual,
    resample_arclength,
    stereographic_project,
    stereographic_unproject,
)
from tantrix.synthesis import FourierLoop

from conftest import latitude_circle, plane_ellipse, tennis_ball


class TestSampledCurve:
    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            SampledCurve(np.zeros((5, 3)), np.arange(4.0))

    def test_rejects_nonincreasing_params(self):
        t = np.array([0.0, 1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        with pytest.raises(ValueError):
            SampledCurve(np.zeros((8, 3)), t, closed=False)

    def test_rejects_wrong_dimension_for_ambient(self):
        with pytest.raises(ValueError):
            SampledCurve(np.zeros((8, 2)), np.arange(8.0), ambient="sphere")
        with pytest.raises(ValueError):
            SampledCurve(np.zeros((8, 3)), np.arange(8.0), ambient="plane")

    def test_closed_curve_needs_enough_samples(self):
        with pytest.raises(ValueError):
            SampledCurve(np.zeros((4, 3)), np.arange(4.0), closed=True)

    def test_default_period_extends_uniform_grid(self):
        c = latitude_circle(np.pi / 3, n=64)
        assert c.period == pytest.approx(2.0 * np.pi)

    def test_diameter_and_length_of_latitude_circle(self):
        colat = np.pi / 4
        c = latitude_circle(colat, n=2048)
        r = np.sin(colat)
        assert c.length() == pytest.approx(2.0 * np.pi * r, rel=1e-4)
        # bounding box diagonal of a flat circle of radius r
        assert c.diameter() == pytest.approx(np.sqrt(2.0) * 2.0 * r, rel=1e-3)

    def test_reversed_traversal_keeps_geometry(self):
        c = tennis_ball(n=128)
        r = c.reversed()
        assert np.allclose(r.points, c.points[::-1])
        assert np.all(np.diff(r.params) > 0)
        assert r.period == pytest.approx(c.period)
        assert r.reversed().points == pytest.approx(c.points)


class TestScalarField:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ScalarField(np.zeros(4), np.arange(5.0))

    def test_band_uses_scale_when_present(self):
        f = ScalarField(np.full(8, 1e-9), np.arange(8.0), scale=2.0)
        assert f.band(1e-6) == pytest.approx(2e-6)

    def test_over_copies_curve_layout(self):
        c = latitude_circle(0.7, n=32)
        f = ScalarField.over(c, np.ones(32), name="unit")
        assert f.closed and f.period == pytest.approx(c.period)


class TestResample:
    def test_resample_makes_speed_uniform(self, tol):
        c = plane_ellipse(3.0, 1.0, n=512)
        r = resample_arclength(c, 512, tol)
        gaps = r.gaps()
        assert gaps.std() / gaps.mean() < 1e-3

    def test_resample_preserves_length_and_diameter(self, tol):
        c = tennis_ball(n=400)
        r = resample_arclength(c, 600, tol)
        assert r.length() == pytest.approx(c.length(), rel=1e-3)
        assert r.diameter() == pytest.approx(c.diameter(), rel=1e-3)

    def test_resample_stays_on_sphere(self, tol):
        c = tennis_ball(n=300)
        r = resample_arclength(c, 300, tol)
        assert np.abs(np.linalg.norm(r.points, axis=1) - 1.0).max() < 1e-9


class TestDifferentiate:
    def test_analytic_generator_beats_divided_differences(self, tol):
        loop = FourierLoop(
            cos_coeffs=[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            sin_coeffs=[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            ambient="space",
        )
        c = loop.curve(n=64)
        d1 = differentiate(c, 1, tol)
        t = c.params
        exact = np.stack([-np.sin(t), np.cos(t), np.zeros_like(t)], axis=1)
        assert np.abs(d1 - exact).max() < 1e-12

    def test_sampled_derivative_converges(self, tol):
        errs = []
        for n in (64, 128, 512):
            t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
            pts = np.stack([np.cos(t), np.sin(t), 0.2 * np.sin(2 * t)], axis=1)
            c = SampledCurve(pts, t, ambient="space")
            d1 = differentiate(c, 1, tol)
            exact = np.stack([-np.sin(t), np.cos(t), 0.4 * np.cos(2 * t)], axis=1)
            errs.append(np.abs(d1 - exact).max())
        assert errs[2] < errs[0] / 4.0
        assert errs[2] < 1e-4


class TestProjections:
    def test_stereographic_round_trip(self, tol):
        c = latitude_circle(2.0, n=128)  # southern cap, away from north pole
        back = stereographic_unproject(stereographic_project(c, tol=tol), tol=tol)
        assert np.abs(back.points - c.points).max() < 1e-12

    def test_stereographic_rejects_curve_through_pole(self, tol):
        t = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        pts = np.stack([np.sin(t), np.zeros(64), np.cos(t)], axis=1)
        c = SampledCurve(pts, t, ambient="sphere")
        with pytest.raises(PoleOnCurve):
            stereographic_project(c, tol=tol)

    def test_beltrami_round_trip(self, tol):
        c = latitude_circle(0.9, n=128)
        pole = (0.0, 0.0, 1.0)
        back = beltrami_unproject(beltrami_project(c, pole, tol), pole, tol)
        assert np.abs(back.points - c.points).max() < 1e-12

    def test_beltrami_needs_open_hemisphere(self, tol):
        c = latitude_circle(np.pi / 2 + 0.2, n=128)
        with pytest.raises(NotInHemisphere):
            beltrami_project(c, (0.0, 0.0, 1.0), tol)

    def test_beltrami_maps_great_circle_near_line(self, tol):
        # a tilted great circle stays close to a straight line in the chart
        t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        axis = np.array([1.0, 0.0, 0.0])
        e2 = np.array([0.0, np.cos(0.3), np.sin(0.3)])
        pts = np.outer(np.cos(t), axis) + np.outer(np.sin(t), e2)
        c = SampledCurve(pts, t, ambient="sphere")
        half = SampledCurve(pts[10:118], t[10:118], closed=False, ambient="sphere")
        flat = beltrami_project(half, pts[64], tol)
        p0, p1 = flat.points[0], flat.points[-1]
        d = p1 - p0
        d = d / np.linalg.norm(d)
        offsets = (flat.points - p0) - np.outer((flat.points - p0) @ d, d)
        assert np.linalg.norm(offsets, axis=1).max() < 1e-9


class TestGaussBonnet:
    @pytest.mark.parametrize("colat", [np.pi / 3, np.pi / 2, 1.9])
    def test_residual_small_on_circles(self, colat, tol):
        c = latitude_circle(colat, n=1024)
        assert abs(gauss_bonnet_residual(c, tol=tol)) < 1e-3

    def test_residual_small_on_wavy_curve(self, tol):
        c = tennis_ball(n=2048, amp=0.5, freq=3)
        assert abs(gauss_bonnet_residual(c, tol=tol)) < 1e-3


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_projection_round_trip_random_caps(seed):
    """Stereographic then inverse is the identity for any curve missing the
    pole; the cap curve is drawn at a random colatitude band."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.6, 2.4)
    amp = rng.uniform(0.0, 0.25)
    t = np.linspace(0.0, 2.0 * np.pi, 128, endpoint=False)
    colat = base + amp * np.sin(3 * t)
    pts = np.stack([np.sin(colat) * np.cos(t), np.sin(colat) * np.sin(t),
                    np.cos(colat)], axis=1)
    c = SampledCurve(pts, t, ambient="sphere")
    back = stereographic_unproject(stereographic_project(c))
    assert np.abs(back.points - c.points).max() < 1e-10

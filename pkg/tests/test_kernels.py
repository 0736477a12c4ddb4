"""Compiled stepping kernel against the numpy reference."""

import os
import subprocess
import sys

import numpy as np
import pytest

from tantrix.kernels import BACKEND, _ref

try:
    from tantrix.kernels import _speed
except ImportError:
    _speed = None


def wavy_cap(n=256, seed=2):
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    colat = np.pi / 3 + 0.1 * np.sin(3 * t) + 0.05 * np.cos(5 * t + rng.uniform(0, np.pi))
    return np.stack([np.sin(colat) * np.cos(t), np.sin(colat) * np.sin(t),
                     np.cos(colat)], axis=1)


class TestReferenceKernel:
    def test_stays_on_sphere(self):
        p, elapsed, done, kmax = _ref.csf_advance(wavy_cap(), 0.2, 200)
        assert done == 200
        assert elapsed > 0
        assert np.abs(np.linalg.norm(p, axis=1) - 1.0).max() < 1e-12
        assert np.isfinite(kmax) and kmax > 0

    def test_respects_max_time(self):
        budget = 1e-4
        p, elapsed, done, _ = _ref.csf_advance(wavy_cap(), 0.2, 10_000, budget)
        assert elapsed == pytest.approx(budget, rel=1e-12)
        assert done < 10_000

    def test_zero_budget_is_a_noop(self):
        pts = wavy_cap()
        p, elapsed, done, _ = _ref.csf_advance(pts, 0.2, 50, 0.0)
        assert elapsed == 0.0 and done == 0
        assert np.array_equal(p, pts)

    def test_circle_shrinks_toward_pole(self):
        t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        colat = np.pi / 3
        pts = np.stack([np.sin(colat) * np.cos(t), np.sin(colat) * np.sin(t),
                        np.full(256, np.cos(colat))], axis=1)
        p, elapsed, done, _ = _ref.csf_advance(pts, 0.2, 400)
        # cos(colatitude) grows like exp(t) under the flow
        want = np.cos(colat) * np.exp(elapsed)
        assert p[:, 2].mean() == pytest.approx(want, rel=1e-3)

    def test_input_not_mutated(self):
        pts = wavy_cap()
        keep = pts.copy()
        _ref.csf_advance(pts, 0.2, 50)
        assert np.array_equal(pts, keep)


@pytest.mark.skipif(_speed is None, reason="compiled extension unavailable")
class TestCompiledKernel:
    def test_agrees_with_reference(self):
        pts = wavy_cap()
        for steps in (1, 17, 300):
            pr, er, dr, kr = _ref.csf_advance(pts, 0.2, steps)
            pc, ec, dc, kc = _speed.csf_advance(pts, 0.2, steps)
            assert dr == dc
            assert er == pytest.approx(ec, abs=1e-12)
            assert np.abs(pr - pc).max() < 1e-9
            assert kr == pytest.approx(kc, rel=1e-9)

    def test_agrees_under_time_budget(self):
        pts = wavy_cap(seed=9)
        pr, er, dr, _ = _ref.csf_advance(pts, 0.3, 10_000, 2e-4)
        pc, ec, dc, _ = _speed.csf_advance(pts, 0.3, 10_000, 2e-4)
        assert (dr, er) == (dc, pytest.approx(ec, abs=1e-15))
        assert np.abs(pr - pc).max() < 1e-9


class TestBackendSelection:
    def test_backend_is_reported(self):
        assert BACKEND in ("compiled", "reference")

    def test_env_var_forces_reference(self):
        env = dict(os.environ, TANTRIX_NO_EXT="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "from tantrix.kernels import BACKEND; print(BACKEND)"],
            capture_output=True, text=True, env=env, check=True,
        )
        assert out.stdout.strip() == "reference"

"""Benchmark the compiled stepping kernel against the numpy reference.

Runs identical curve-shortening workloads through both implementations,
checks that they agree to floating-point accumulation error, and reports
wall-clock timings with the speedup factor.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import sys
import time

import numpy as np

from tantrix.kernels import _ref

try:
    from tantrix.kernels import _speed
except ImportError:
    _speed = None


def test_curve(n, seed=7):
    """Perturbed latitude circle: smooth, simple, strictly inside a cap."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    colat = np.pi / 3 + 0.12 * np.sin(3 * t) + 0.05 * np.cos(5 * t + rng.uniform(0, np.pi))
    pts = np.stack([np.sin(colat) * np.cos(t),
                    np.sin(colat) * np.sin(t),
                    np.cos(colat)], axis=1)
    return pts


def run_one(impl, pts, cfl, steps, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = impl.csf_advance(pts.copy(), cfl, steps)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[256, 1024, 4096])
    args = ap.parse_args(argv)

    if _speed is None:
        print("compiled kernel not built; only the reference timing follows")

    cfl = 0.2
    agree = True
    print("%8s %12s %12s %9s %12s" % ("n", "reference", "compiled",
                                      "speedup", "max |dp|"))
    for n in args.sizes:
        pts = test_curve(n)
        (p_ref, e_ref, s_ref, k_ref), t_ref = run_one(
            _ref, pts, cfl, args.steps, args.repeat)
        if _speed is None:
            print("%8d %10.4fs %12s %9s %12s" % (n, t_ref, "-", "-", "-"))
            continue
        (p_fast, e_fast, s_fast, k_fast), t_fast = run_one(
            _speed, pts, cfl, args.steps, args.repeat)
        dp = float(np.abs(p_ref - p_fast).max())
        ok = (dp < 1e-9 and s_ref == s_fast
              and abs(e_ref - e_fast) < 1e-12
              and abs(k_ref - k_fast) < 1e-9 * max(1.0, k_ref))
        agree = agree and ok
        print("%8d %10.4fs %10.4fs %8.1fx %12.3g%s"
              % (n, t_ref, t_fast, t_ref / max(t_fast, 1e-12), dp,
                 "" if ok else "  MISMATCH"))
    if not agree:
        print("FAIL: kernel outputs disagree beyond tolerance")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

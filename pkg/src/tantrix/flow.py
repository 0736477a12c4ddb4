"""Curve shortening flow on the unit sphere.

Explicit Euler stepping of dp/dt = k n with n = p x T and k the geodesic
curvature, instrumented so the monotone quantities (inflection count,
intersections with the antipodal image) and the area law A' = A - 2 pi can
be checked along a run.  The hot loop lives in tantrix.kernels; this module
drives it, resamples to arc length every few steps to control tangential
drift, and records snapshots.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DegenerateCurve, FlowBlowup, NotSimple, StepTooLarge
from .geom import DEFAULT_TOL, SampledCurve, Tolerances, resample_arclength
from .invariants import INFINITE, count_inflections, is_finite_count
from .kernels import csf_advance

CFL = 0.25
STABILITY_BOUND = 0.5
RESAMPLE_EVERY = 10
EXTINCTION_TOL = 1e-2
# states with diameter below this are too close to the extinction point for
# trustworthy counting (curvature blows up faster than sampling can follow)
NEAR_EXTINCTION = 10 * EXTINCTION_TOL
BLOWUP_K = 1e6


@dataclass
class FlowState:
    """One snapshot of a flowing curve.

    area is the enclosed area of the tracked side: the side the flow
    normal p x T points into (the left of the traversal), which is the
    side that shrinks for a curve traversed counterclockwise around it.
    """

    curve: SampledCurve
    t: float
    step_count: int
    area: float


@dataclass
class FlowTrajectory:
    """Time-ordered snapshots with the per-state monotone counts.

    inflection_counts and antipodal_intersection_counts align with states;
    entries are ints or a sentinel when counting was not meaningful.
    extinction_time is set when the diameter dropped below the extinction
    tolerance; hemisphere_entry_time when a hemisphere watch fired.
    """

    states: List[FlowState] = field(default_factory=list)
    inflection_counts: list = field(default_factory=list)
    antipodal_intersection_counts: list = field(default_factory=list)
    extinction_time: Optional[float] = None
    hemisphere_entry_time: Optional[float] = None

    def times(self):
        return np.array([s.t for s in self.states])

    def areas(self):
        return np.array([s.area for s in self.states])


def _require_flowable(curve):
    if curve.ambient != "sphere" or not curve.closed:
        raise ValueError("the flow runs on closed spherical curves")


def _area_of(curve, tol):
    from .incidence import enclosed_area

    return enclosed_area(curve, tol, assume_simple=True).left


def flow_state(curve, t=0.0, step_count=0, tol: Tolerances = DEFAULT_TOL) -> FlowState:
    """Wrap a curve as a FlowState with its tracked-side area computed."""
    _require_flowable(curve)
    return FlowState(curve=curve, t=float(t), step_count=int(step_count),
                     area=_area_of(curve, tol))


def _min_gap(points):
    d = np.diff(points, axis=0)
    gaps = np.linalg.norm(np.vstack([d, points[:1] - points[-1:]]), axis=1)
    return float(gaps.min())


def csf_step(state: FlowState, dt=None, tol: Tolerances = DEFAULT_TOL) -> FlowState:
    """One explicit Euler step.

    dt defaults to the standard step 0.25 * (min gap)^2 and may not exceed
    the stability bound 0.5 * (min gap)^2.  The curve is renormalized to
    the sphere and, every RESAMPLE_EVERY accumulated steps, resampled to
    arc length.
    """
    curve = state.curve
    _require_flowable(curve)
    if curve.diameter() < EXTINCTION_TOL:
        raise DegenerateCurve("curve diameter is below the extinction tolerance")
    m = _min_gap(curve.points)
    if m <= 0.0:
        raise DegenerateCurve("coincident consecutive samples")
    if dt is None:
        dt = CFL * m * m
    elif dt > STABILITY_BOUND * m * m:
        raise StepTooLarge(
            f"dt={dt:.3g} exceeds the stability bound {STABILITY_BOUND * m * m:.3g}"
        )
    pts, elapsed, done, kmax = csf_advance(curve.points, dt / (m * m), 1)
    if done != 1 or not np.isfinite(pts).all() or not np.isfinite(kmax):
        raise FlowBlowup("step produced non-finite samples")
    new = curve.with_points(pts)
    steps = state.step_count + 1
    if steps % RESAMPLE_EVERY == 0:
        new = resample_arclength(new, new.n, tol)
    return FlowState(curve=new, t=state.t + elapsed, step_count=steps,
                     area=_area_of(new, tol))


def _advance(curve, t, step_count, t_target, extinction_tol, tol):
    """Drive the kernel from time t to t_target, resampling on schedule.

    Returns (curve, t, step_count, reason) with reason "time" or
    "extinct"; raises FlowBlowup when the samples degenerate.
    """
    while t < t_target:
        chunk = RESAMPLE_EVERY - (step_count % RESAMPLE_EVERY)
        pts, elapsed, done, kmax = csf_advance(
            curve.points, CFL, chunk, max_time=t_target - t
        )
        if not np.isfinite(kmax) or not np.isfinite(pts).all():
            raise FlowBlowup("flow samples degenerated")
        if kmax > BLOWUP_K:
            raise FlowBlowup(f"curvature exceeded the safety bound ({kmax:.3g})")
        if done == 0 and elapsed == 0.0:
            break
        t += elapsed
        step_count += done
        curve = curve.with_points(pts)
        if step_count % RESAMPLE_EVERY == 0:
            curve = resample_arclength(curve, curve.n, tol)
        if curve.diameter() < extinction_tol:
            return curve, t, step_count, "extinct"
    return curve, t, step_count, "time"


def _antipodal_count(curve, tol):
    from .incidence import coincidence_pairs

    _, anti = coincidence_pairs(curve, tol)
    return anti.count


def _refine_entry(lo, hi, extinction_tol, tol):
    """Bisect flow time for the earliest state with a hemisphere pole.

    lo and hi are (curve, t, step_count) with the pole absent at lo and
    present at hi.  Stepping to an interior time reuses the kernel with a
    shortened final step, so any target time is reachable exactly.
    """
    from .incidence import hemisphere_pole

    lo_curve, lo_t, lo_sc = lo
    best = hi
    hi_t = hi[1]
    for _ in range(64):
        if hi_t - lo_t <= 1e-12 * max(1.0, abs(hi_t)):
            break
        mid = 0.5 * (lo_t + hi_t)
        c, tt, sc, reason = _advance(lo_curve, lo_t, lo_sc, mid, extinction_tol, tol)
        if reason == "extinct" or tt <= lo_t:
            break
        if hemisphere_pole(c, tol) is not None:
            best = (c, tt, sc)
            hi_t = tt
        else:
            lo_curve, lo_t, lo_sc = c, tt, sc
    return best


def csf_run(curve, stop=None, tol: Tolerances = DEFAULT_TOL,
            record_interval=None) -> FlowTrajectory:
    """Flow a simple closed spherical curve, recording snapshots.

    stop accepts the keys max_time (default 1.0), extinction_tol (default
    1e-2) and hemisphere_watch (default False).  The run ends at extinction,
    at max_time, or at the first recorded hemisphere entry when watching;
    in the last case the entry time is refined by bisection so the final
    state sits at the threshold, with the origin still on (or just inside)
    its hull boundary.
    """
    from .incidence import coincidence_pairs, hemisphere_pole

    _require_flowable(curve)
    opts = {"max_time": 1.0, "extinction_tol": EXTINCTION_TOL,
            "hemisphere_watch": False}
    if stop:
        unknown = set(stop) - set(opts)
        if unknown:
            raise ValueError(f"unknown stop keys: {sorted(unknown)}")
        opts.update(stop)
    max_time = float(opts["max_time"])
    ext_tol = float(opts["extinction_tol"])
    watch = bool(opts["hemisphere_watch"])
    if record_interval is None:
        record_interval = max(max_time / 100.0, 1e-4)

    self_pairs, _ = coincidence_pairs(curve, tol)
    if self_pairs.count == INFINITE or self_pairs.count != 0:
        raise NotSimple("the flow needs a simple curve")

    cur = resample_arclength(curve, curve.n, tol)
    t = 0.0
    sc = 0
    traj = FlowTrajectory()

    def record(c, tt, scount):
        traj.states.append(FlowState(curve=c, t=tt, step_count=scount,
                                     area=_area_of(c, tol)))
        traj.inflection_counts.append(count_inflections(c, tol).count)
        traj.antipodal_intersection_counts.append(_antipodal_count(c, tol))

    record(cur, t, sc)
    if watch and hemisphere_pole(cur, tol) is not None:
        traj.hemisphere_entry_time = 0.0
        return traj

    while t < max_time:
        t_next = min(t + record_interval, max_time)
        prev = (cur, t, sc)
        cur, t, sc, reason = _advance(cur, t, sc, t_next, ext_tol, tol)
        if reason == "extinct":
            traj.extinction_time = t
            record(cur, t, sc)
            break
        if t <= prev[1]:
            break
        record(cur, t, sc)
        if watch and hemisphere_pole(cur, tol) is not None:
            cur, t, sc = _refine_entry(prev, (cur, t, sc), ext_tol, tol)
            traj.states.pop()
            traj.inflection_counts.pop()
            traj.antipodal_intersection_counts.pop()
            record(cur, t, sc)
            traj.hemisphere_entry_time = t
            break
    return traj


def monotonicity_report(traj: FlowTrajectory) -> list:
    """Transitions where a monotone count increased; empty list = pass.

    States with diameter below NEAR_EXTINCTION are skipped: counting there
    measures sampling noise against a curvature blowup.  Transitions where
    either endpoint carries a sentinel count are skipped as well.
    """
    violations = []
    prev_idx = None
    for j, st in enumerate(traj.states):
        if st.curve.diameter() < NEAR_EXTINCTION:
            continue
        if prev_idx is not None:
            for name, series in (
                ("inflections", traj.inflection_counts),
                ("antipodal_intersections", traj.antipodal_intersection_counts),
            ):
                a, b = series[prev_idx], series[j]
                if is_finite_count(a) and is_finite_count(b) and int(b) > int(a):
                    violations.append({
                        "index": j,
                        "time": st.t,
                        "quantity": name,
                        "before": int(a),
                        "after": int(b),
                    })
        prev_idx = j
    return violations

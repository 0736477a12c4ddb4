"""Batch front end: JSON curve specs in, JSON reports and numeric tables out.

Commands: analyze, flow, surgery, corpus, verify-all.  Every command
reads one or more spec files, builds the described curves, runs the
requested computations, and writes one report per curve into the output
directory.  Reports are deterministic: repeated runs with identical
specs and the same package version produce byte-identical files, and
corpus generation is deterministic regardless of worker count.

Exit codes: 0 when every computed verdict holds (equality and noted
degeneracies included), 2 when any verdict is violated, 1 for
operational errors (malformed specs, generator failures).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import SpecParseError, TantrixError
from .flow import csf_run
from .geom import DEFAULT_TOL, SampledCurve, Tolerances
from .invariants import frenet, geodesic_curvature, invariant_report
from .surgery import desingularize, resolve_double_point
from .synthesis import (
    ArcAssembly,
    FourierLoop,
    default_variant,
    integrate_tantrix,
    random_fourier_loop,
    sharp_example,
    sharp_triples,
)
from .verify import darboux_report, verify_projective, verify_space, verify_spherical

SCHEMA_VERSION = 1
GENERATORS = ("samples", "fourier", "arc_assembly", "sharp_example",
              "integrated_tantrix")
ANALYSES = ("invariants", "verify", "darboux", "projective")
_TOL_FIELDS = {f.name for f in dataclasses.fields(Tolerances)}
_ID_OK = set("abcdefghijklmnopqrstuvwxyz"
             "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-")


# ---------------------------------------------------------------------------
# spec ingestion


def _fail(path, field, msg):
    raise SpecParseError("%s: field %r: %s" % (path, field, msg))


def _validate_spec(entry, path, pos):
    if not isinstance(entry, dict):
        raise SpecParseError("%s: entry %d is not an object" % (path, pos))
    cid = entry.get("id")
    if not isinstance(cid, str) or not cid:
        _fail(path, "id", "required non-empty string (entry %d)" % pos)
    if set(cid) - _ID_OK:
        _fail(path, "id", "%r contains characters outside [A-Za-z0-9_.-]" % cid)
    gen = entry.get("generator")
    if gen not in GENERATORS:
        _fail(path, "generator", "%r is not one of %s" % (gen, list(GENERATORS)))
    params = entry.get("params", {})
    if not isinstance(params, dict):
        _fail(path, "params", "must be an object")
    tols = entry.get("tolerances", {})
    if not isinstance(tols, dict):
        _fail(path, "tolerances", "must be an object")
    unknown = set(tols) - _TOL_FIELDS
    if unknown:
        _fail(path, "tolerances", "unknown keys %s" % sorted(unknown))
    analyses = entry.get("analyses", ["invariants", "verify"])
    if (not isinstance(analyses, list)
            or any(a not in ANALYSES for a in analyses)):
        _fail(path, "analyses", "must be a list drawn from %s" % list(ANALYSES))
    known = {"id", "generator", "params", "tolerances", "analyses",
             "count", "seed", "flow", "surgery"}
    stray = set(entry) - known
    if stray:
        _fail(path, sorted(stray)[0], "unknown field")
    return {
        "id": cid,
        "generator": gen,
        "params": params,
        "tolerances": dict(tols),
        "analyses": list(analyses),
        "count": entry.get("count"),
        "seed": entry.get("seed"),
        "flow": entry.get("flow", {}),
        "surgery": entry.get("surgery", {}),
        "source_file": path,
    }


def load_specs(paths):
    """Parse and validate every spec file; nothing is written on failure."""
    specs = []
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SpecParseError("%s: %s" % (path, exc))
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecParseError(
                "%s: line %d: %s" % (path, exc.lineno, exc.msg))
        if isinstance(doc, dict) and "curves" in doc:
            entries = doc["curves"]
            if not isinstance(entries, list):
                _fail(path, "curves", "must be a list")
        elif isinstance(doc, dict):
            entries = [doc]
        elif isinstance(doc, list):
            entries = doc
        else:
            raise SpecParseError("%s: top level must be an object or list"
                                 % path)
        for pos, entry in enumerate(entries):
            specs.append(_validate_spec(entry, path, pos))
    seen = {}
    for spec in specs:
        if spec["id"] in seen:
            raise SpecParseError(
                "%s: field 'id': %r already used in %s"
                % (spec["source_file"], spec["id"], seen[spec["id"]]))
        seen[spec["id"]] = spec["source_file"]
    return specs


def _tolerances_from(overrides, base=None):
    base = base if base is not None else DEFAULT_TOL
    if not overrides:
        return base
    return dataclasses.replace(base, **{k: float(v) for k, v in overrides.items()})


def _load_tol_file(path):
    if not path:
        return DEFAULT_TOL
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecParseError("%s: %s" % (path, exc))
    if not isinstance(doc, dict) or set(doc) - _TOL_FIELDS:
        raise SpecParseError(
            "%s: tolerance file must map a subset of %s"
            % (path, sorted(_TOL_FIELDS)))
    return _tolerances_from(doc)


# ---------------------------------------------------------------------------
# curve construction


def _spec_error(spec, field, msg):
    _fail(spec["source_file"], field, "%s (curve %r)" % (msg, spec["id"]))


def _samples_curve(spec, params, n, tol):
    ambient = params.get("ambient", "sphere")
    dim = 2 if ambient == "plane" else 3
    if "file" in params:
        try:
            table = np.loadtxt(params["file"], ndmin=2)
        except (OSError, ValueError) as exc:
            _spec_error(spec, "params.file", str(exc))
        if table.shape[1] == dim + 1:
            pts, pars = table[:, 1:dim + 1], table[:, 0]
        elif table.shape[1] >= dim:
            pts, pars = table[:, :dim], None
        else:
            _spec_error(spec, "params.file",
                        "needs %d coordinate columns" % dim)
    else:
        if "points" not in params:
            _spec_error(spec, "params.points",
                        "samples generator needs points or file")
        pts = np.asarray(params["points"], dtype=float)
        pars = (np.asarray(params["params"], dtype=float)
                if "params" in params else None)
    closed = bool(params.get("closed", True))
    kwargs = {}
    if pars is not None:
        kwargs["params"] = pars
    if "period" in params:
        kwargs["period"] = float(params["period"])
    return SampledCurve(points=pts, closed=closed, ambient=ambient, **kwargs)


def _fourier_curve(spec, params, n, seed_default, tol):
    if "cos" in params or "sin" in params:
        cos = np.asarray(params.get("cos", []), dtype=float)
        sin = np.asarray(params.get("sin", []), dtype=float)
        loop = FourierLoop(cos, sin, ambient=params.get("ambient", "space"))
        return loop.curve(n=n, tol=tol)
    seed = params.get("seed", spec.get("seed"))
    if seed is None:
        seed = seed_default
    return random_fourier_loop(
        int(seed), int(params.get("degree", 4)),
        ambient=params.get("ambient", "sphere"),
        constraints=params.get("constraints"),
        n=n, tol=tol)


def _arc_assembly_curve(spec, params, n, tol):
    if "arcs" not in params:
        _spec_error(spec, "params.arcs", "arc_assembly generator needs arcs")
    arcs = []
    for i, arc in enumerate(params["arcs"]):
        if len(arc) != 5:
            _spec_error(spec, "params.arcs",
                        "arc %d must be [center, radius, theta0, theta1, sense]" % i)
        c, r, t0, t1, sense = arc
        arcs.append((np.asarray(c, dtype=float), float(r), float(t0),
                     float(t1), int(sense)))
    junctions = tuple(params.get("junctions", ()))
    assembly = ArcAssembly(arcs=arcs, junctions=junctions, tol=tol)
    return assembly.lift(n=n, tol=tol)


def _sharp_curve(spec, params, n, tol):
    if "target" not in params or "family" not in params:
        _spec_error(spec, "params", "sharp_example needs target and family")
    target = tuple(int(x) for x in params["target"])
    family = params["family"]
    variant = params.get("variant") or default_variant(target, family)
    return sharp_example(target, family, variant, n=n, tol=tol)


def build_curve(spec, n_default, seed_default, base_tol):
    """Materialize the curve a validated spec describes."""
    params = spec["params"]
    tol = _tolerances_from(spec["tolerances"], base_tol)
    n = int(params.get("n", n_default))
    gen = spec["generator"]
    if gen == "samples":
        return _samples_curve(spec, params, n, tol), tol
    if gen == "fourier":
        return _fourier_curve(spec, params, n, seed_default, tol), tol
    if gen == "arc_assembly":
        return _arc_assembly_curve(spec, params, n, tol), tol
    if gen == "sharp_example":
        return _sharp_curve(spec, params, n, tol), tol
    # integrated_tantrix: build the source spherical curve, then integrate
    source = params.get("source")
    if not isinstance(source, dict):
        _spec_error(spec, "params.source",
                    "integrated_tantrix needs a nested generator object")
    nested = dict(source)
    nested.setdefault("id", spec["id"] + ".source")
    nested.setdefault("tolerances", {})
    nested = _validate_spec(nested, spec["source_file"], 0)
    T, _ = build_curve(nested, n_default, seed_default, base_tol)
    if T.ambient != "sphere":
        _spec_error(spec, "params.source", "source must be a spherical curve")
    return integrate_tantrix(T, v_min=float(params.get("v_min", 0.1)),
                             tol=tol), tol


# ---------------------------------------------------------------------------
# serialization


def _json_value(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_json_value(v) for v in x]
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    return x


def _count_dict(cr):
    return {
        "count": _json_value(cr.count),
        "genuine": _json_value(cr.genuine_count),
        "locations": _json_value(np.asarray(cr.locations, dtype=float)),
        "kinds": list(cr.kinds),
    }


def report_dict(rep):
    out = {
        "ambient": rep.ambient,
        "n": rep.n,
        "sigma": _json_value(rep.sigma),
        "sigma_plus": _json_value(rep.sigma_plus),
        "hull_status": rep.hull_status,
        "hemisphere_pole": _json_value(rep.hemisphere_pole)
        if rep.hemisphere_pole is not None else None,
    }
    for name in ("D", "D_plus", "antipodal", "S", "I", "V", "P", "P_plus",
                 "curvature_extrema"):
        out[name] = _count_dict(getattr(rep, name))
    return out


def verdict_dict(v):
    return {
        "id": v.id,
        "lhs": _json_value(v.lhs),
        "rhs": v.rhs,
        "status": v.status,
        "notes": list(v.notes),
        "hypotheses": [[name, _json_value(val)] for name, val in v.hypotheses],
    }


def _dump_json(doc):
    return json.dumps(_json_value(doc), sort_keys=True, indent=2) + "\n"


def _polyline_table(curve, tol):
    """Plain numeric table: parameter, coordinates, curvature fields."""
    cols = ["param"] + list("xyz"[: curve.dim])
    data = [curve.params] + [curve.points[:, i] for i in range(curve.dim)]
    try:
        if curve.ambient == "space":
            fr = frenet(curve, tol)
            cols += ["kappa", "tau"]
            data += [fr.kappa, np.where(np.isnan(fr.tau), 0.0, fr.tau)]
        else:
            gk = geodesic_curvature(curve, tol)
            cols += ["geodesic_curvature"]
            data += [gk.values]
    except TantrixError:
        pass
    lines = ["# " + " ".join(cols)]
    for row in zip(*data):
        lines.append(" ".join("%.17g" % v for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# per-curve processing


def _verdicts_for(curve, spec, rep, tol):
    verdicts = []
    wanted = spec["analyses"]
    if "verify" in wanted:
        if curve.ambient == "sphere":
            verdicts.extend(verify_spherical(curve, tol, report=rep))
        elif curve.ambient == "space":
            verdicts.extend(verify_space(curve, tol, report=rep))
    if "darboux" in wanted and curve.ambient == "space":
        verdicts.append(darboux_report(curve, tol))
    if "projective" in wanted:
        kind = spec["params"].get("lift_kind")
        if kind is None:
            _spec_error(spec, "params.lift_kind",
                        "projective analysis needs lift_kind")
        verdicts.extend(verify_projective(curve, kind, tol))
    return verdicts


def _provenance(spec, curve, tol):
    return {
        "generator": spec["generator"],
        "params": _json_value(spec["params"]),
        "seed": _json_value(spec["params"].get("seed", spec.get("seed"))),
        "n": curve.n,
        "tolerances": {f.name: getattr(tol, f.name)
                       for f in dataclasses.fields(Tolerances)},
        "artifact_version": __version__,
    }


def process_entry(task):
    """Worker: build one curve and compute its report.

    Returns (curve_id, report_doc, extra_files) where extra_files maps
    relative file names to text content.  Must stay picklable (runs in a
    process pool for corpus commands).  Module errors are re-raised with
    the curve id attached.
    """
    spec = task[0]
    try:
        return _process_entry(task)
    except SpecParseError:
        raise
    except (TantrixError, ValueError, KeyError) as exc:
        raise TantrixError(
            "curve %r: %s: %s" % (spec["id"], type(exc).__name__, exc)
        ) from exc


def _process_entry(task):
    spec, command, n_default, seed_default, tol_overrides = task
    base_tol = _tolerances_from(tol_overrides)
    curve, tol = build_curve(spec, n_default, seed_default, base_tol)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "curve": spec["id"],
        "provenance": _provenance(spec, curve, tol),
    }
    extra = {}

    if command == "surgery":
        su = spec["surgery"]
        op = su.get("op")
        if op == "desingularize":
            outcome = desingularize(curve, float(su["location"]),
                                    float(su.get("radius", 0.3)), tol)
        elif op == "resolve_double_point":
            outcome = resolve_double_point(curve, tuple(su["pair"]), tol)
        else:
            _spec_error(spec, "surgery.op",
                        "must be desingularize or resolve_double_point")
        doc["surgery"] = {
            "op": op,
            "classification": outcome.classification,
            "inflections_added": outcome.inflections_added,
            "sigma_plus_before": _json_value(outcome.sigma_plus_before),
            "sigma_plus_after": _json_value(outcome.sigma_plus_after),
        }
        curve = outcome.result

    rep = invariant_report(curve, tol)
    doc["invariants"] = report_dict(rep)
    verdicts = _verdicts_for(curve, spec, rep, tol)
    doc["verdicts"] = [verdict_dict(v) for v in verdicts]

    if command == "flow":
        traj = csf_run(curve, stop=spec["flow"] or None, tol=tol)
        doc["trajectory"] = {
            "times": _json_value(traj.times()),
            "areas": _json_value(traj.areas()),
            "inflection_counts": _json_value(traj.inflection_counts),
            "antipodal_intersection_counts":
                _json_value(traj.antipodal_intersection_counts),
            "extinction_time": _json_value(traj.extinction_time),
            "hemisphere_entry_time": _json_value(traj.hemisphere_entry_time),
        }
        rows = ["# t area inflections antipodal"]
        for st, ic, ac in zip(traj.states, traj.inflection_counts,
                              traj.antipodal_intersection_counts):
            rows.append("%.17g %.17g %s %s" % (st.t, st.area, ic, ac))
        extra[spec["id"] + ".trajectory.txt"] = "\n".join(rows) + "\n"

    if command in ("analyze", "surgery"):
        extra[spec["id"] + ".polyline.txt"] = _polyline_table(curve, tol)
    return spec["id"], doc, extra


# ---------------------------------------------------------------------------
# corpus expansion


def corpus_entries(spec, seed_default):
    """Expand one corpus spec into concrete curve specs.

    fourier corpora draw `count` seeded curves; sharp_example corpora
    without an explicit target enumerate every triple of the family (or
    of all families when none is given); anything else passes through.
    """
    gen = spec["generator"]
    params = spec["params"]
    if gen == "fourier" and "cos" not in params and "sin" not in params:
        count = int(spec.get("count") or 1)
        base = spec.get("seed", params.get("seed"))
        base = int(base) if base is not None else int(seed_default)
        out = []
        for i in range(count):
            sub = {k: spec[k] for k in
                   ("generator", "tolerances", "analyses", "flow", "surgery")}
            sub["params"] = dict(params, seed=base + i)
            sub["id"] = "%s-%04d" % (spec["id"], i)
            sub["source_file"] = spec["source_file"]
            sub["count"] = None
            sub["seed"] = None
            out.append(sub)
        return out
    if gen == "sharp_example" and "target" not in params:
        families = ([params["family"]] if "family" in params
                    else ["eq3", "eq4", "eq5"])
        out = []
        for family in families:
            for trip in sharp_triples(family):
                sub = {k: spec[k] for k in
                       ("generator", "tolerances", "analyses", "flow",
                        "surgery")}
                sub["params"] = dict(params, target=list(trip), family=family)
                sub["id"] = "%s-%s-%d%d%d" % ((spec["id"], family) + trip)
                sub["source_file"] = spec["source_file"]
                sub["count"] = None
                sub["seed"] = None
                out.append(sub)
        return out
    return [spec]


# ---------------------------------------------------------------------------
# command driver


def _write(out_dir, name, text):
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def run(command, spec_paths, out_dir, n_samples=512, seed=0, tol_file=None,
        jobs=1):
    """Execute one command over the given spec files; returns the exit code."""
    base_tol = _load_tol_file(tol_file)
    tol_overrides = ({f.name: getattr(base_tol, f.name)
                      for f in dataclasses.fields(Tolerances)}
                     if tol_file else {})
    specs = load_specs(spec_paths)
    if command == "verify-all":
        for spec in specs:
            if "verify" not in spec["analyses"]:
                spec["analyses"].append("verify")
    if command == "corpus":
        expanded = []
        for spec in specs:
            expanded.extend(corpus_entries(spec, seed))
        ids = [s["id"] for s in expanded]
        if len(ids) != len(set(ids)):
            raise SpecParseError("corpus expansion produced duplicate ids")
        specs = expanded

    os.makedirs(out_dir, exist_ok=True)
    tasks = [(spec, command, n_samples, seed, tol_overrides) for spec in specs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(process_entry, tasks))
    else:
        results = [process_entry(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    violated = False
    for cid, doc, extra in results:
        for v in doc.get("verdicts", ()):
            if v["status"] == "violated":
                violated = True
        _write(out_dir, cid + ".report.json", _dump_json(doc))
        for name, text in sorted(extra.items()):
            _write(out_dir, name, text)

    if command == "corpus":
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "artifact_version": __version__,
            "curves": [
                {"id": s["id"], "generator": s["generator"],
                 "params": _json_value(s["params"]),
                 "tolerances": s["tolerances"], "analyses": s["analyses"]}
                for s in specs
            ],
        }
        _write(out_dir, "manifest.json", _dump_json(manifest))
    return 2 if violated else 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tantrix",
        description="Batch analysis of closed-curve invariants, flows, "
                    "surgeries, and inequality verification.")
    parser.add_argument("command",
                        choices=["analyze", "flow", "surgery", "corpus",
                                 "verify-all"])
    parser.add_argument("specs", nargs="+", help="curve spec files (JSON)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--n-samples", type=int, default=512,
                        help="default sample count for generators")
    parser.add_argument("--seed", type=int, default=0,
                        help="default seed for random generators")
    parser.add_argument("--tol-file", default=None,
                        help="JSON file of tolerance overrides")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for corpus processing")
    args = parser.parse_args(argv)

    try:
        code = run(args.command, args.specs, args.out,
                   n_samples=args.n_samples,
                   seed=args.seed, tol_file=args.tol_file, jobs=args.jobs)
    except SpecParseError as exc:
        print("spec error: %s" % exc, file=sys.stderr)
        return 1
    except TantrixError as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())

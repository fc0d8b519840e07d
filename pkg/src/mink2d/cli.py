"""Command-line front end.

Commands: analyze, phase, expand, isometry, diagnose, suite.
Exit codes: 0 success, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import (
    IsometryError,
    NonSmoothSpaceError,
    NormError,
    SphereIsometry,
    absolute_smoothness_proxy,
    build_natural_param,
    build_phase_profile,
    chord_sweep,
    classify,
    euclidean_spec,
    eval_norm,
    expansion_report,
    lipschitz_scan,
    load_isometry_spec,
    load_norm_spec,
    lp_spec,
    make_space,
    mazur_ulam_check,
    phase,
    polygon_spec,
    supercurvature,
    verify_isometry,
    write_expansion_csv,
    write_phase_csv,
    write_samples_csv,
    write_scans_csv,
)
from .chords import chord_frame_data, mu_second_closed, nu_derivatives_closed, nu_derivatives_fd, recover_phi_prime
from .geometry import Vec2
from .svgplot import write_phase_svg, write_sphere_svg


class InputError(Exception):
    pass


def _parse_args(argv):
    ap = argparse.ArgumentParser(prog="mink2d",
                                 description="2-dimensional Minkowski plane toolkit")
    ap.add_argument("--norm", help="path to a JSON norm spec")
    ap.add_argument("--cmd", required=True,
                    choices=["analyze", "phase", "expand", "isometry", "diagnose", "suite"])
    ap.add_argument("--grid", type=int, default=1024)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--isometry", help="path to a JSON isometry spec")
    return ap.parse_args(argv)


def _load_space(args):
    if not args.norm:
        raise InputError("--norm is required for this command")
    try:
        spec = load_norm_spec(args.norm)
        return make_space(spec)
    except FileNotFoundError as exc:
        raise InputError(f"norm spec not found: {exc}") from exc
    except (NormError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"invalid norm spec: {exc}") from exc


def _meta(space, args, np_=None):
    m = {"norm": space.label, "grid_size": args.grid, "seed": args.seed,
         "orientation": "ccw", "base_point": "angle0",
         "is_smooth": space.is_smooth, "is_strictly_convex": space.is_strictly_convex}
    if np_ is not None:
        m["L"] = np_.L
        m["build_tol"] = np_.build_tol
    return m


def _write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_analyze(args) -> int:
    space = _load_space(args)
    np_ = build_natural_param(space, args.grid)
    write_samples_csv(np_, os.path.join(args.out, "samples.csv"))
    write_sphere_svg(np_, os.path.join(args.out, "sphere.svg"))
    _write_json(os.path.join(args.out, "analyze_meta.json"), _meta(space, args, np_))
    print(f"analyze: norm={space.label} L={np_.L:.12g}")
    return 0


def cmd_phase(args) -> int:
    space = _load_space(args)
    np_ = build_natural_param(space, args.grid)
    profile = build_phase_profile(np_, min(args.grid, 1024))
    write_phase_csv(profile, os.path.join(args.out, "phase.csv"))
    write_phase_svg(profile, os.path.join(args.out, "phase.svg"))
    _write_json(os.path.join(args.out, "phase_meta.json"), _meta(space, args, np_))
    print(f"phase: norm={space.label} rows={len(profile.s)}")
    return 0


def cmd_expand(args) -> int:
    space = _load_space(args)
    np_ = build_natural_param(space, args.grid)
    rng = np.random.default_rng(args.seed)
    margin = 1e-2 * np_.L if space.spec.family == "lp" and space.spec.p < 2 else None
    reports = [expansion_report(np_, b, s)
               for b, s in chord_sweep(np_, 32, rng, exclude_axis_margin=margin)]
    write_expansion_csv(reports, np_, os.path.join(args.out, "expansion.csv"))
    _write_json(os.path.join(args.out, "expand_meta.json"), _meta(space, args, np_))
    print(f"expand: norm={space.label} chords={len(reports)}")
    return 0


def cmd_isometry(args) -> int:
    space = _load_space(args)
    if not args.isometry:
        raise InputError("--isometry is required for the isometry command")
    np_ = build_natural_param(space, args.grid)
    try:
        f = load_isometry_spec(args.isometry, np_, np_)
    except FileNotFoundError as exc:
        raise InputError(f"isometry spec not found: {exc}") from exc
    except (IsometryError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise InputError(f"invalid isometry spec: {exc}") from exc
    rep = mazur_ulam_check(space, f, np_, np_, seed=args.seed)
    with open(os.path.join(args.out, "isometry_report.json"), "w", newline="\n") as fh:
        fh.write(rep.to_json())
        fh.write("\n")
    print(f"isometry: norm={space.label} status={'PASS' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 1


def cmd_diagnose(args) -> int:
    space = _load_space(args)
    np_ = build_natural_param(space, args.grid)
    rep = absolute_smoothness_proxy(np_, min(args.grid, 512))
    write_scans_csv(rep.scans, np_, os.path.join(args.out, "diagnose.csv"))
    meta = _meta(space, args, np_)
    meta["diverging_clusters"] = len(rep.clusters)
    meta["verdict"] = rep.verdict
    meta["note"] = rep.note
    _write_json(os.path.join(args.out, "diagnose_meta.json"), meta)
    print(f"diagnose: norm={space.label} diverging={len(rep.diverging_params)} verdict={rep.verdict!r}")
    return 0


def _suite_checks(args):
    """Reduced deterministic acceptance checks; yields (name, ok, detail)."""
    eu = make_space(euclidean_spec())
    npe = build_natural_param(eu, 512)
    ok = abs(npe.L - math.pi) <= 1e-7
    s = np.arange(128) * (2.0 * npe.L / 128)
    phi = phase(npe, s)
    P, T = supercurvature(npe, s)
    ok &= float(np.max(np.abs(phi - s - math.pi / 2))) <= 1e-6
    ok &= float(np.max(np.abs(P - 1.0))) <= 1e-5 and float(np.max(np.abs(T))) <= 1e-5
    cfd = chord_frame_data(npe, math.pi / 3, 0.0)
    n1, n2 = nu_derivatives_closed(cfd)
    ok &= abs(n1 + math.sqrt(3) / 2) <= 1e-5 and abs(n2 + 0.25) <= 1e-4
    ok &= abs(mu_second_closed(cfd, n2) + 1.0) <= 1e-3
    ok &= abs(recover_phi_prime(cfd, n2, supercurvature(npe, 0.0)[0]) - 1.0) <= 1e-2
    yield "C1 euclidean closed forms", bool(ok), f"L={npe.L:.9f}"

    lp3 = make_space(lp_spec(3.0))
    np3 = build_natural_param(lp3, 1024)
    anti = np3.points + np.roll(np3.points, -np3.grid_size // 2, axis=0)
    ok = float(np.max(lp3.gauge_many(anti[:, 0], anti[:, 1]))) <= 1e-6
    ok &= 3.0 <= np3.L <= 4.0
    phi3 = phase(np3, np.arange(256) * (2.0 * np3.L / 256))
    ok &= bool(np.all(np.diff(phi3) > 0.0))
    rng = np.random.default_rng(args.seed)
    for b, s_dir in chord_sweep(np3, 8, rng):
        c = chord_frame_data(np3, b, s_dir)
        (c1, c2), (f1, f2) = nu_derivatives_closed(c), nu_derivatives_fd(np3, c)
        ok &= abs(c1 - f1) <= 1e-4 + 1e-3 * abs(c1)
        ok &= abs(c2 - f2) <= 1e-4 + 1e-3 * abs(c2)
    yield "C2 lp(3) expansion formulas", bool(ok), f"L={np3.L:.9f}"

    rot = SphereIsometry.linear(lp3, lp3, [[0, -1], [1, 0]])
    rep = mazur_ulam_check(lp3, rot, np3, np3, seed=args.seed)
    ok = rep.passed

    def doubling(pts):
        from .norms import chart_points
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        return chart_points(eu, 2.0 * ang)

    dbl = SphereIsometry.from_callable(eu, eu, doubling)
    ok &= verify_isometry(dbl, 256, args.seed) >= 0.1
    yield "C3 isometry pipeline", bool(ok), f"rot90 {'PASS' if rep.passed else 'FAIL'}"

    hexspec = polygon_spec([(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3))
                            for k in range(6)], "hexagon")
    hexspace = make_space(hexspec)
    try:
        build_natural_param(hexspace, 512)
        ok = False
        detail = "hexagon was not refused"
    except NonSmoothSpaceError as exc:
        ok = "corner" in str(exc)
        detail = str(exc)
    res = classify(hexspec)
    ok &= (not res.is_smooth) and (not res.is_strictly_convex)
    res = classify(euclidean_spec())
    ok &= res.is_smooth and res.is_strictly_convex
    yield "C4 degeneracy handling", bool(ok), detail

    lp15 = make_space(lp_spec(1.5))
    np15 = build_natural_param(lp15, 2048)
    ok = lipschitz_scan(np15, 0.0).verdict == "diverging"
    ok &= lipschitz_scan(np15, np15.L / 2.0).verdict == "diverging"
    for i in range(4):
        ok &= lipschitz_scan(np15, (i + 0.42) * np15.L / 2.0).verdict == "bounded"
    yield "C5 lp(1.5) phase-shift divergence", bool(ok), "axis scans diverging"


def cmd_suite(args) -> int:
    results = []
    for name, ok, detail in _suite_checks(args):
        line = f"{name}: {'PASS' if ok else 'FAIL'}"
        print(line)
        results.append({"name": name, "passed": bool(ok), "detail": detail})
    _write_json(os.path.join(args.out, "suite_report.json"),
                {"seed": args.seed, "results": results,
                 "status": "PASS" if all(r["passed"] for r in results) else "FAIL"})
    return 0 if all(r["passed"] for r in results) else 1


def main(argv=None) -> int:
    args = _parse_args(argv if argv is not None else sys.argv[1:])
    # MINK2D_THREADS caps internal parallelism; evaluation is currently
    # single-threaded, so the value is only recorded.
    os.environ.setdefault("MINK2D_THREADS", "1")
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        print(f"input error: output directory not writable: {exc}", file=sys.stderr)
        return 2
    handlers = {"analyze": cmd_analyze, "phase": cmd_phase, "expand": cmd_expand,
                "isometry": cmd_isometry, "diagnose": cmd_diagnose, "suite": cmd_suite}
    try:
        return handlers[args.cmd](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NonSmoothSpaceError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NormError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

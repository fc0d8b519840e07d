"""Sphere isometries, their verification, and linear extension reconstruction.

A SphereIsometry maps the source unit sphere onto the target unit sphere. It
can be induced by a 2x2 linear map, by a parameter-line isometry s -> a*s + b
between natural parameterizations, by a sampled table on the source natural
grid, or by an arbitrary callable (test fixtures for non-isometries).

The pipeline check mirrors the desk-scale Mazur-Ulam question: verify the
isometry property, antipodality, recover the parameter-line isometry, rebuild
the candidate linear extension from two anchors, and compare it against the
sphere map everywhere.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .geometry import Vec2
from .natural_param import NaturalParam
from .norms import NormSpace, eval_norm


class IsometryError(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearMap2:
    """2x2 linear map in the fixed basis."""
    m00: float
    m01: float
    m10: float
    m11: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]])

    @staticmethod
    def from_matrix(m) -> "LinearMap2":
        m = np.asarray(m, dtype=float)
        return LinearMap2(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @staticmethod
    def identity() -> "LinearMap2":
        return LinearMap2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def rotation(angle: float) -> "LinearMap2":
        c, s = math.cos(angle), math.sin(angle)
        return LinearMap2(c, -s, s, c)

    def apply(self, v: Vec2) -> Vec2:
        return Vec2(self.m00 * v.x + self.m01 * v.y, self.m10 * v.x + self.m11 * v.y)

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.matrix.T


@dataclass
class SphereIsometry:
    source: NormSpace
    target: NormSpace
    kind: str  # 'linear' | 'param' | 'samples' | 'callable'
    tolerance: float = 1e-8
    matrix: np.ndarray | None = None
    a: int | None = None
    b: float | None = None
    np_source: NaturalParam | None = None
    np_target: NaturalParam | None = None
    sample_s: np.ndarray | None = field(default=None, repr=False)
    sample_img: np.ndarray | None = field(default=None, repr=False)
    fn: Callable | None = field(default=None, repr=False)
    _spline: CubicSpline | None = field(default=None, repr=False)

    @staticmethod
    def linear(source: NormSpace, target: NormSpace, matrix,
               tolerance: float = 1e-8) -> "SphereIsometry":
        return SphereIsometry(source=source, target=target, kind="linear",
                              tolerance=tolerance,
                              matrix=np.asarray(matrix, dtype=float))

    @staticmethod
    def param(np_source: NaturalParam, np_target: NaturalParam, a: int, b: float,
              tolerance: float = 1e-8) -> "SphereIsometry":
        if a not in (1, -1):
            raise IsometryError(f"param-map orientation must be +1 or -1, got {a}")
        return SphereIsometry(source=np_source.space, target=np_target.space,
                              kind="param", tolerance=tolerance, a=a, b=float(b),
                              np_source=np_source, np_target=np_target)

    @staticmethod
    def samples(np_source: NaturalParam, target: NormSpace, images: np.ndarray,
                tolerance: float = 1e-8, validate: bool = True) -> "SphereIsometry":
        """Sample map stored on the natural-parameter grid of the source sphere."""
        images = np.asarray(images, dtype=float)
        if images.shape != np_source.points.shape:
            raise IsometryError("sample image table must match the source grid")
        if validate:
            gn = target.gauge_many(images[:, 0], images[:, 1])
            worst = float(np.max(np.abs(gn - 1.0)))
            if worst > 1e-8:
                raise IsometryError(f"sample images leave the target sphere by {worst:.3e}")
        iso = SphereIsometry(source=np_source.space, target=target, kind="samples",
                             tolerance=tolerance, np_source=np_source,
                             sample_s=np_source.s_grid.copy(), sample_img=images)
        per = np_source.perimeter
        xs = np.concatenate([iso.sample_s, [per]])
        iso._spline = CubicSpline(xs, np.vstack([images, images[:1]]),
                                  bc_type="periodic", axis=0)
        return iso

    @staticmethod
    def from_callable(source: NormSpace, target: NormSpace, fn: Callable,
                      tolerance: float = 1e-8) -> "SphereIsometry":
        """fn maps an (n, 2) array of sphere points to their images."""
        return SphereIsometry(source=source, target=target, kind="callable",
                              tolerance=tolerance, fn=fn)

    def __call__(self, v: Vec2) -> Vec2:
        return Vec2.from_array(apply_many(self, v.as_array()[None, :])[0])


def apply_many(f: SphereIsometry, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if f.kind == "linear":
        return pts @ f.matrix.T
    if f.kind == "param":
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        s = f.np_source.chart.s_of_t(np.mod(ang, 2.0 * math.pi))
        return f.np_target.point_exact(f.a * s + f.b)
    if f.kind == "samples":
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        s = np.mod(f.np_source.chart.s_of_t(np.mod(ang, 2.0 * math.pi)),
                   f.np_source.perimeter)
        return f._spline(s)
    if f.kind == "callable":
        return f.fn(pts)
    raise IsometryError(f"unknown isometry kind {f.kind!r}")


def _sphere_samples(space: NormSpace, n: int, seed: int | None = None) -> np.ndarray:
    if seed is None:
        ang = np.arange(n) * (2.0 * math.pi / n)
    else:
        ang = np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi, n)
    from .norms import chart_points
    return chart_points(space, ang)


def verify_isometry(f: SphereIsometry, n_pairs: int, seed: int = 42) -> float:
    """Max | ||f(p)-f(q)||_Y - ||p-q||_X | over sampled point pairs."""
    rng = np.random.default_rng(seed)
    ang = rng.uniform(0.0, 2.0 * math.pi, (n_pairs, 2))
    from .norms import chart_points
    p = chart_points(f.source, ang[:, 0])
    q = chart_points(f.source, ang[:, 1])
    src = f.source.gauge_many(*(p - q).T)
    img_p = apply_many(f, p)
    img_q = apply_many(f, q)
    dst = f.target.gauge_many(*(img_p - img_q).T)
    return float(np.max(np.abs(dst - src)))


def antipodality_check(f: SphereIsometry, n_points: int, seed: int = 42) -> float:
    """Max ||f(-x) + f(x)||_Y over sphere samples (antipode preservation)."""
    pts = _sphere_samples(f.source, n_points, seed)
    r = apply_many(f, pts) + apply_many(f, -pts)
    return float(np.max(f.target.gauge_many(r[:, 0], r[:, 1])))


def _param_residual(f: SphereIsometry, np_X: NaturalParam, np_Y: NaturalParam,
                    imgs: np.ndarray, s: np.ndarray, a: int, b: float) -> float:
    d = imgs - np_Y.point_exact(a * s + b)
    return float(np.max(f.target.gauge_many(d[:, 0], d[:, 1])))


def recover_param_line_isometry(f: SphereIsometry, np_X: NaturalParam,
                                np_Y: NaturalParam, grid: int = 256):
    """Fit s -> a*s + b with f(r_X(s)) = r_Y(a*s + b). Returns (a, b, residual)."""
    if abs(np_X.perimeter - np_Y.perimeter) > 1e-6:
        raise IsometryError(f"spheres not congruent: 2L_X={np_X.perimeter:.9f} "
                            f"vs 2L_Y={np_Y.perimeter:.9f}")
    s = np.arange(grid) * (np_X.perimeter / grid)
    imgs = apply_many(f, np_X.point_exact(s))
    per = np_Y.perimeter
    best = None
    for a in (1, -1):
        coarse = np.arange(512) * (per / 512)
        vals = [_param_residual(f, np_X, np_Y, imgs, s, a, b) for b in coarse]
        j = int(np.argmin(vals))
        lo = coarse[j] - per / 512
        hi = coarse[j] + per / 512
        gr = (math.sqrt(5.0) - 1.0) / 2.0
        c = hi - gr * (hi - lo)
        d = lo + gr * (hi - lo)
        fc = _param_residual(f, np_X, np_Y, imgs, s, a, c)
        fd = _param_residual(f, np_X, np_Y, imgs, s, a, d)
        while hi - lo > 1e-12:
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - gr * (hi - lo)
                fc = _param_residual(f, np_X, np_Y, imgs, s, a, c)
            else:
                lo, c, fc = c, d, fd
                d = lo + gr * (hi - lo)
                fd = _param_residual(f, np_X, np_Y, imgs, s, a, d)
        b = 0.5 * (lo + hi)
        res = _param_residual(f, np_X, np_Y, imgs, s, a, b)
        if best is None or res < best[2]:
            best = (a, b % per, res)
    if best[2] > 1e-3:
        raise IsometryError(f"no parameter-line isometry fits (best residual {best[2]:.3e}); "
                            "f is not an isometry or the spheres are not congruent")
    return best


def reconstruct_linear_extension(f: SphereIsometry, p1: Vec2, p2: Vec2) -> LinearMap2:
    """The unique linear T with T(p1) = f(p1), T(p2) = f(p2)."""
    for p in (p1, p2):
        if abs(eval_norm(f.source, p) - 1.0) > 1e-7:
            raise IsometryError("anchors must lie on the source sphere")
    det = p1.cross(p2)
    if abs(det) < 0.1:
        raise IsometryError(f"anchor points nearly dependent (|det| = {abs(det):.3f} < 0.1)")
    basis = np.array([[p1.x, p2.x], [p1.y, p2.y]])
    images = np.stack([f(p1).as_array(), f(p2).as_array()], axis=1)
    return LinearMap2.from_matrix(images @ np.linalg.inv(basis))


@dataclass(frozen=True)
class ExtensionCheck:
    max_point_error: float
    norm_distortion: float


def verify_extension(T: LinearMap2, f: SphereIsometry, n_points: int,
                     seed: int = 42) -> ExtensionCheck:
    """Max ||T(x) - f(x)||_Y over sphere samples plus norm distortion of T."""
    pts = _sphere_samples(f.source, n_points)
    d = T.apply_many(pts) - apply_many(f, pts)
    max_err = float(np.max(f.target.gauge_many(d[:, 0], d[:, 1])))
    rng = np.random.default_rng(seed)
    probes = rng.uniform(-2.0, 2.0, (n_points, 2))
    src = f.source.gauge_many(probes[:, 0], probes[:, 1])
    img = T.apply_many(probes)
    dst = f.target.gauge_many(img[:, 0], img[:, 1])
    return ExtensionCheck(max_point_error=max_err,
                          norm_distortion=float(np.max(np.abs(dst - src))))


def _pick_anchor(np_: NaturalParam, p1: Vec2) -> Vec2:
    dets = np.abs(p1.x * np_.points[:, 1] - p1.y * np_.points[:, 0])
    return Vec2.from_array(np_.points[int(np.argmax(dets))])


@dataclass
class MazurUlamReport:
    passed: bool
    distortion: float | None = None
    antipodality: float | None = None
    param_line: tuple | None = None
    extension: LinearMap2 | None = None
    extension_error: float | None = None
    norm_distortion: float | None = None
    anchor_agreement: float | None = None
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        def flt(v):
            return None if v is None else float(v)

        return {
            "status": self.status,
            "distortion": flt(self.distortion),
            "antipodality": flt(self.antipodality),
            "param_line": None if self.param_line is None else
                {"a": int(self.param_line[0]), "b": float(self.param_line[1]),
                 "residual": float(self.param_line[2])},
            "extension_matrix": None if self.extension is None else
                [[self.extension.m00, self.extension.m01],
                 [self.extension.m10, self.extension.m11]],
            "extension_error": flt(self.extension_error),
            "norm_distortion": flt(self.norm_distortion),
            "anchor_agreement": flt(self.anchor_agreement),
            "witnesses": [{"s": w.s, "n_chords": w.n_checked,
                           "max_residual": w.max_residual,
                           "note": "witness evidence only"} for w in self.witnesses],
            "failures": list(self.failures),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def mazur_ulam_check(space: NormSpace, f: SphereIsometry,
                     np_X: NaturalParam | None = None,
                     np_Y: NaturalParam | None = None,
                     n_samples: int = 1024, seed: int = 42) -> MazurUlamReport:
    """Full pipeline: isometry check, antipodality, parameter-line recovery,
    linear extension reconstruction and verification, special-direction
    witnesses at two linearly independent directions. Sub-failures are
    aggregated, not aborted on."""
    from .chords import special_direction_witness
    from .natural_param import build_natural_param

    rep = MazurUlamReport(passed=False)
    rep.distortion = verify_isometry(f, 512, seed)
    if rep.distortion > max(f.tolerance, 1e-8):
        rep.failures.append(f"distortion {rep.distortion:.3e} exceeds tolerance")
    rep.antipodality = antipodality_check(f, 256, seed)
    if rep.antipodality > 1e-7:
        rep.failures.append(f"antipodality residual {rep.antipodality:.3e} > 1e-7")

    if np_X is None:
        np_X = build_natural_param(space, 1024)
    if np_Y is None:
        np_Y = np_X if f.target is space else build_natural_param(f.target, 1024)

    try:
        rep.param_line = recover_param_line_isometry(f, np_X, np_Y)
        if rep.param_line[2] > 1e-6:
            rep.failures.append(f"param-line residual {rep.param_line[2]:.3e} > 1e-6")
    except IsometryError as exc:
        rep.failures.append(f"param-line recovery failed: {exc}")

    try:
        p1 = Vec2.from_array(np_X.points[0])
        p2 = _pick_anchor(np_X, p1)
        T = reconstruct_linear_extension(f, p1, p2)
        rep.extension = T
        check = verify_extension(T, f, n_samples, seed)
        rep.extension_error = check.max_point_error
        rep.norm_distortion = check.norm_distortion
        if check.max_point_error > 1e-7:
            rep.failures.append(f"extension error {check.max_point_error:.3e} > 1e-7")
        q1 = Vec2.from_array(np_X.points[np_X.grid_size // 3])
        q2 = _pick_anchor(np_X, q1)
        T2 = reconstruct_linear_extension(f, q1, q2)
        rep.anchor_agreement = float(np.max(np.abs(T.matrix - T2.matrix)))
        if rep.anchor_agreement > 1e-7:
            rep.failures.append(f"anchor-pair disagreement {rep.anchor_agreement:.3e} > 1e-7")
    except IsometryError as exc:
        rep.failures.append(f"extension reconstruction failed: {exc}")

    try:
        s1 = 0.0
        dets = np.abs(np_X.points[0, 0] * np_X.points[:, 1]
                      - np_X.points[0, 1] * np_X.points[:, 0])
        s2 = float(np_X.s_grid[int(np.argmax(dets))])
        for s_dir in (s1, s2):
            w = special_direction_witness(f, np_X, s_dir, 32, seed)
            rep.witnesses.append(w)
            if w.max_residual > 1e-6:
                rep.failures.append(f"witness residual {w.max_residual:.3e} at s={s_dir:.6f}")
    except Exception as exc:  # witness depends on earlier stages
        rep.failures.append(f"special-direction witness failed: {exc}")

    rep.passed = not rep.failures
    return rep


def load_isometry_spec(path, np_source: NaturalParam,
                       np_target: NaturalParam) -> SphereIsometry:
    """JSON isometry spec: param / linear / samples (CSV sx,sy,tx,ty)."""
    import os

    with open(path) as fh:
        obj = json.load(fh)
    kind = obj.get("kind")
    if kind == "param":
        allowed = {"kind", "a", "b"}
        if set(obj) - allowed:
            raise IsometryError(f"unknown fields in isometry spec: {sorted(set(obj) - allowed)}")
        return SphereIsometry.param(np_source, np_target, int(obj["a"]), float(obj["b"]))
    if kind == "linear":
        allowed = {"kind", "matrix"}
        if set(obj) - allowed:
            raise IsometryError(f"unknown fields in isometry spec: {sorted(set(obj) - allowed)}")
        return SphereIsometry.linear(np_source.space, np_target.space, obj["matrix"])
    if kind == "samples":
        allowed = {"kind", "file"}
        if set(obj) - allowed:
            raise IsometryError(f"unknown fields in isometry spec: {sorted(set(obj) - allowed)}")
        csv_path = os.path.join(os.path.dirname(os.path.abspath(path)), obj["file"])
        rows = []
        with open(csv_path) as fh:
            for row in csv.DictReader(fh):
                rows.append((float(row["sx"]), float(row["sy"]),
                             float(row["tx"]), float(row["ty"])))
        src = np.array([[r[0], r[1]] for r in rows])
        img = np.array([[r[2], r[3]] for r in rows])
        ang = np.mod(np.arctan2(src[:, 1], src[:, 0]), 2.0 * math.pi)
        s = np.mod(np_source.chart.s_of_t(ang), np_source.perimeter)
        order = np.argsort(s)
        # resample onto the natural grid through a periodic spline
        per = np_source.perimeter
        xs = np.concatenate([s[order], [s[order][0] + per]])
        ys = np.vstack([img[order], img[order][:1]])
        spline = CubicSpline(xs, ys, bc_type="periodic", axis=0)
        images = spline(np.mod(np_source.s_grid - s[order][0], per) + s[order][0])
        return SphereIsometry.samples(np_source, np_target.space, images)
    raise IsometryError(f"unknown isometry kind {kind!r}")

"""Planar norms represented as gauge functions of centrally symmetric convex bodies.

Supported families: euclidean, lp (1 < p < inf), polygon (gauge of a convex
centrally symmetric polygon), trig_perturbed_circle (radial perturbation of the
circle), and custom (arbitrary vectorized gauge callable, construct-only).

Classification of smoothness / strict convexity is numerical: turning angles of
boundary secants at a fixed resolution, with a multi-scale corner hunt that
separates genuine corners from high- (or unbounded-) curvature smooth arcs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import Vec2

TWO_PI = 2.0 * math.pi

CLASSIFY_TOL = 1e-7
INDETERMINATE_FACTOR = 10.0

_FAMILIES = ("euclidean", "lp", "polygon", "trig_perturbed_circle", "custom")


class NormError(ValueError):
    """Invalid norm specification or invalid input to a norm operation."""


class IndeterminateClassification(NormError):
    """A classification proxy landed inside the tolerance band."""

    def __init__(self, what: str, angle: float):
        self.what = what
        self.angle = angle
        super().__init__(f"indeterminate {what} classification near angle {angle:.9f}")


@dataclass(frozen=True)
class NormSpec:
    family: str
    label: str
    p: float | None = None
    vertices: tuple[tuple[float, float], ...] | None = None
    coeffs: tuple[float, ...] | None = None
    gauge: Callable | None = field(default=None, compare=False)


def euclidean_spec(label: str = "euclidean") -> NormSpec:
    return NormSpec(family="euclidean", label=label)


def lp_spec(p: float, label: str | None = None) -> NormSpec:
    p = float(p)
    if not (p > 1.0 and math.isfinite(p)):
        raise NormError(f"lp family requires 1 < p < inf, got p={p}")
    return NormSpec(family="lp", label=label or f"lp{p:g}", p=p)


def polygon_spec(vertices: Sequence, label: str = "polygon") -> NormSpec:
    verts = tuple((float(v[0]), float(v[1])) for v in vertices)
    n = len(verts)
    if n < 4 or n % 2 != 0:
        raise NormError("polygon needs an even number (>= 4) of vertices")
    arr = np.asarray(verts, dtype=float)
    # strictly counterclockwise convex position
    for i in range(n):
        e0 = arr[(i + 1) % n] - arr[i]
        e1 = arr[(i + 2) % n] - arr[(i + 1) % n]
        if e0[0] * e1[1] - e0[1] * e1[0] <= 1e-12:
            raise NormError("polygon vertices must be in strictly counterclockwise convex position")
    # central symmetry: v and -v both present
    half = n // 2
    if not np.allclose(arr, -np.roll(arr, -half, axis=0), atol=1e-9):
        raise NormError("polygon must be centrally symmetric (v and -v both present)")
    return NormSpec(family="polygon", label=label, vertices=verts)


def trig_perturbed_circle_spec(coeffs: Sequence[float], label: str = "trig") -> NormSpec:
    return NormSpec(family="trig_perturbed_circle", label=label,
                    coeffs=tuple(float(c) for c in coeffs))


def custom_spec(gauge: Callable, label: str = "custom") -> NormSpec:
    """gauge(xs, ys) must be vectorized over numpy arrays and positively homogeneous."""
    return NormSpec(family="custom", label=label, gauge=gauge)


def _polygon_support(verts: np.ndarray) -> np.ndarray:
    """Coefficients (a_i, b_i) of the supporting line a*x + b*y = 1 of each edge."""
    n = len(verts)
    sup = np.empty((n, 2))
    for i in range(n):
        m = np.array([verts[i], verts[(i + 1) % n]])
        sup[i] = np.linalg.solve(m, np.ones(2))
    return sup


def _trig_rho(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    k = np.arange(1, len(coeffs) + 1)
    return 1.0 + np.cos(2.0 * np.outer(t, k)) @ coeffs


def _trig_rho_prime(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    k = np.arange(1, len(coeffs) + 1)
    return -np.sin(2.0 * np.outer(t, k)) @ (2.0 * k * coeffs)


def _make_gauge(spec: NormSpec) -> Callable:
    """Vectorized gauge ||(x, y)|| as a closure over the spec."""
    if spec.family == "euclidean":
        return lambda xs, ys: np.hypot(xs, ys)
    if spec.family == "lp":
        p = spec.p

        def lp_gauge(xs, ys):
            ax, ay = np.abs(xs), np.abs(ys)
            m = np.maximum(ax, ay)
            with np.errstate(invalid="ignore"):
                r = np.where(m > 0.0,
                             ((ax / np.where(m > 0, m, 1.0)) ** p
                              + (ay / np.where(m > 0, m, 1.0)) ** p) ** (1.0 / p),
                             0.0)
            return m * r

        return lp_gauge
    if spec.family == "polygon":
        sup = _polygon_support(np.asarray(spec.vertices, dtype=float))
        return lambda xs, ys: np.max(np.multiply.outer(np.asarray(xs), sup[:, 0])
                                     + np.multiply.outer(np.asarray(ys), sup[:, 1]), axis=-1)
    if spec.family == "trig_perturbed_circle":
        coeffs = np.asarray(spec.coeffs, dtype=float)

        def trig_gauge(xs, ys):
            r = np.hypot(xs, ys)
            t = np.arctan2(ys, xs)
            return r / _trig_rho(coeffs, np.atleast_1d(t)).reshape(np.shape(t))

        return trig_gauge
    if spec.family == "custom":
        return spec.gauge
    raise NormError(f"unknown norm family {spec.family!r}")


@dataclass
class NormSpace:
    """A planar norm with cached smoothness / strict-convexity classification."""

    spec: NormSpec
    is_smooth: bool
    is_strictly_convex: bool
    classification_resolution: int
    corner_angle: float | None = None
    flat_angle: float | None = None
    _gauge: Callable = field(default=None, repr=False, compare=False)

    @property
    def label(self) -> str:
        return self.spec.label

    def gauge_many(self, xs, ys) -> np.ndarray:
        return self._gauge(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))


def eval_norm(space: NormSpace, v: Vec2) -> float:
    """Gauge value ||v|| of the space's unit ball."""
    if not (math.isfinite(v.x) and math.isfinite(v.y)):
        raise NormError(f"eval_norm rejects non-finite input ({v.x}, {v.y})")
    return float(space.gauge_many(np.array([v.x]), np.array([v.y]))[0])


def boundary_point(space: NormSpace, angle: float) -> Vec2:
    """Unit-sphere point in direction `angle` (radians, counterclockwise)."""
    pt = chart_points(space, np.array([float(angle)]))[0]
    return Vec2(float(pt[0]), float(pt[1]))


def chart_points(space_or_gauge, t: np.ndarray) -> np.ndarray:
    """Vectorized boundary points of the angular chart, shape (n, 2)."""
    gauge = space_or_gauge._gauge if isinstance(space_or_gauge, NormSpace) else space_or_gauge
    t = np.asarray(t, dtype=float)
    c, s = np.cos(t), np.sin(t)
    g = gauge(c, s)
    return np.stack([c / g, s / g], axis=-1)


_FD_CHART_STEP = TWO_PI * 1e-5


def chart_velocity(space: NormSpace, t: np.ndarray) -> np.ndarray:
    """Derivative of the angular chart d/dt boundary_point(t), shape (n, 2).

    Analytic where the family provides a closed form, central finite
    differences of the gauge chart otherwise.
    """
    t = np.asarray(t, dtype=float)
    fam = space.spec.family
    if fam == "euclidean":
        return np.stack([-np.sin(t), np.cos(t)], axis=-1)
    if fam == "lp":
        p = space.spec.p
        c, s = np.cos(t), np.sin(t)
        n = (np.abs(c) ** p + np.abs(s) ** p) ** (1.0 / p)
        dn = n ** (1.0 - p) * (-s * np.abs(c) ** (p - 1.0) * np.sign(c)
                               + c * np.abs(s) ** (p - 1.0) * np.sign(s))
        gx = -s / n - c * dn / n ** 2
        gy = c / n - s * dn / n ** 2
        return np.stack([gx, gy], axis=-1)
    if fam == "trig_perturbed_circle":
        coeffs = np.asarray(space.spec.coeffs, dtype=float)
        t1 = np.atleast_1d(t)
        rho = _trig_rho(coeffs, t1).reshape(t.shape)
        drho = _trig_rho_prime(coeffs, t1).reshape(t.shape)
        c, s = np.cos(t), np.sin(t)
        return np.stack([drho * c - rho * s, drho * s + rho * c], axis=-1)
    if fam == "polygon":
        raise NormError("polygon spheres have no chart derivative (non-smooth space)")
    h = _FD_CHART_STEP
    return (chart_points(space, t + h) - chart_points(space, t - h)) / (2.0 * h)


@dataclass(frozen=True)
class ClassificationResult:
    is_smooth: bool
    is_strictly_convex: bool
    corner_angle: float | None
    flat_angle: float | None


def _turn_angles(pts: np.ndarray) -> np.ndarray:
    """Signed turning angle at each point of a closed polyline."""
    d = np.roll(pts, -1, axis=0) - pts
    d0 = np.roll(d, 1, axis=0)
    cross = d0[:, 0] * d[:, 1] - d0[:, 1] * d[:, 0]
    dot = np.einsum("ij,ij->i", d0, d)
    return np.arctan2(cross, dot)


def _window_turns(gauge, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    mid = 0.5 * (lo + hi)
    p0 = chart_points(gauge, lo)
    p1 = chart_points(gauge, mid)
    p2 = chart_points(gauge, hi)
    d0 = p1 - p0
    d1 = p2 - p1
    cross = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
    dot = np.einsum("ij,ij->i", d0, d1)
    return np.abs(np.arctan2(cross, dot))


def _hunt_corners(gauge, lo: np.ndarray, hi: np.ndarray):
    """Bisect suspicious windows, tracking turn decay across scales.

    A corner keeps its turning angle as the window shrinks; a smooth arc's
    turn decays (possibly slowly, e.g. like sqrt(width) at curvature
    blow-up points of lp spheres with p < 2).

    Returns (corner_angles, indeterminate_angles).
    """
    lo = lo.copy()
    hi = hi.copy()
    active = np.ones(len(lo), dtype=bool)
    history: list[np.ndarray] = []
    width = float(hi[0] - lo[0]) if len(lo) else 0.0
    while len(lo) and width > 1e-7:
        turn = _window_turns(gauge, lo, hi)
        history.append(turn)
        smooth_now = turn < CLASSIFY_TOL
        active &= ~smooth_now
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        mh = 0.5 * (mid + hi)
        tl = _window_turns_triplet(gauge, lo, lm, mid)
        tr = _window_turns_triplet(gauge, mid, mh, hi)
        go_left = tl >= tr
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
        width *= 0.5
    corners: list[float] = []
    indeterminate: list[float] = []
    if not len(lo) or len(history) < 7:
        return corners, indeterminate
    final = _window_turns(gauge, lo, hi)
    base = history[-7]
    mid = 0.5 * (lo + hi)
    for i in np.nonzero(active)[0]:
        if final[i] < CLASSIFY_TOL:
            continue
        ratio = (final[i] / max(base[i], 1e-300)) ** (1.0 / 7.0)
        if ratio <= 0.90:
            continue  # decaying turn: smooth
        if ratio >= 0.97 and final[i] > INDETERMINATE_FACTOR * CLASSIFY_TOL:
            corners.append(float(mid[i]))
        else:
            indeterminate.append(float(mid[i]))
    return corners, indeterminate


def _window_turns_triplet(gauge, a, b, c) -> np.ndarray:
    p0 = chart_points(gauge, a)
    p1 = chart_points(gauge, b)
    p2 = chart_points(gauge, c)
    d0 = p1 - p0
    d1 = p2 - p1
    cross = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
    dot = np.einsum("ij,ij->i", d0, d1)
    return np.abs(np.arctan2(cross, dot))


def classify(spec: NormSpec, resolution: int = 256) -> ClassificationResult:
    """Numerical smoothness / strict-convexity proxies on the boundary chart.

    Strict convexity: no three consecutive boundary samples collinear (the
    minimum turning angle stays above CLASSIFY_TOL). Smoothness: no window of
    the fine scan holds a persistent turning angle under bisection.

    Raises IndeterminateClassification when a proxy lands inside the band
    (CLASSIFY_TOL, 10 * CLASSIFY_TOL); indeterminate is distinct from false.
    """
    if resolution < 64:
        raise NormError(f"classification resolution must be >= 64, got {resolution}")
    gauge = _make_gauge(spec)

    step = TWO_PI / resolution
    ts = (np.arange(resolution) + 0.5) * step
    pts = chart_points(gauge, ts)
    turns = _turn_angles(pts)
    if np.any(turns < -1e-9):
        bad = float(ts[int(np.argmin(turns))])
        raise NormError(f"boundary is not convex near angle {bad:.9f}")
    min_turn = float(np.min(turns))
    flat_angle = None
    if min_turn < CLASSIFY_TOL:
        strictly_convex = False
        flat_angle = float(ts[int(np.argmin(turns))])
    elif min_turn < INDETERMINATE_FACTOR * CLASSIFY_TOL:
        raise IndeterminateClassification("strict convexity", float(ts[int(np.argmin(turns))]))
    else:
        strictly_convex = True

    fine = 8 * resolution
    fstep = TWO_PI / fine
    fts = (np.arange(fine) + 0.5) * fstep
    fturns = _turn_angles(chart_points(gauge, fts))
    cand = np.nonzero(np.abs(fturns) > CLASSIFY_TOL)[0]
    corner_angle = None
    if len(cand):
        lo = fts[cand] - fstep
        hi = fts[cand] + fstep
        corners, indet = _hunt_corners(gauge, lo, hi)
        if corners:
            corner_angle = min(c % TWO_PI for c in corners)
            smooth = False
        elif indet:
            raise IndeterminateClassification("smoothness", indet[0] % TWO_PI)
        else:
            smooth = True
    else:
        smooth = True
    return ClassificationResult(is_smooth=smooth, is_strictly_convex=strictly_convex,
                                corner_angle=corner_angle, flat_angle=flat_angle)


def make_space(spec: NormSpec, classification_resolution: int = 256) -> NormSpace:
    """Build a NormSpace, validating and classifying the gauge."""
    gauge = _make_gauge(spec)
    if spec.family == "trig_perturbed_circle":
        t = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        rho = _trig_rho(np.asarray(spec.coeffs, dtype=float), t)
        if np.min(rho) < 1e-6:
            raise NormError("trig_perturbed_circle radial function is not positive")
    result = classify(spec, classification_resolution)
    if spec.family == "trig_perturbed_circle" and not (result.is_smooth and result.is_strictly_convex):
        raise NormError("trig_perturbed_circle coefficients do not yield a smooth strictly convex gauge")
    return NormSpace(spec=spec,
                     is_smooth=result.is_smooth,
                     is_strictly_convex=result.is_strictly_convex,
                     classification_resolution=classification_resolution,
                     corner_angle=result.corner_angle,
                     flat_angle=result.flat_angle,
                     _gauge=gauge)


_JSON_FIELDS = {
    "euclidean": set(),
    "lp": {"p"},
    "polygon": {"vertices"},
    "trig_perturbed_circle": {"coeffs"},
}


def parse_norm_spec(obj: dict) -> NormSpec:
    """Parse the JSON norm-spec document. Unknown fields are rejected."""
    if not isinstance(obj, dict):
        raise NormError("norm spec must be a JSON object")
    family = obj.get("family")
    if family == "custom":
        raise NormError("custom gauges are construct-only and cannot be loaded from JSON")
    if family not in _JSON_FIELDS:
        raise NormError(f"unknown norm family {family!r}")
    allowed = _JSON_FIELDS[family] | {"family", "label"}
    unknown = set(obj) - allowed
    if unknown:
        raise NormError(f"unknown fields in norm spec: {sorted(unknown)}")
    missing = _JSON_FIELDS[family] - set(obj)
    if missing:
        raise NormError(f"missing fields in norm spec: {sorted(missing)}")
    label = obj.get("label", family)
    if family == "euclidean":
        return euclidean_spec(label)
    if family == "lp":
        return lp_spec(obj["p"], label)
    if family == "polygon":
        return polygon_spec(obj["vertices"], label)
    return trig_perturbed_circle_spec(obj["coeffs"], label)


def load_norm_spec(path) -> NormSpec:
    with open(path) as fh:
        return parse_norm_spec(json.load(fh))

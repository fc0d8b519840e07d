"""Natural (unit self-speed) parameterizations of unit spheres.

The builder integrates self-arclength along the angular chart, inverts the
monotone map, and tabulates r and r' on a uniform grid over one period [0, 2L).
Public evaluation interpolates the table with periodic cubic splines; internal
chart-backed evaluators (point_exact / tangent_exact) are used by downstream
modules where residual tolerances are tighter than interpolation error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .arclength import ArcLengthChart
from .geometry import Vec2
from .norms import TWO_PI, NormSpace, eval_norm


class BuildError(RuntimeError):
    """Natural parameterization construction failed."""


class NonSmoothSpaceError(BuildError):
    """The space has a corner; no natural parameterization exists."""


class UnitSpeedError(BuildError):
    def __init__(self, max_deviation: float):
        self.max_deviation = max_deviation
        super().__init__(f"unit-speed validation failed: max |speed - 1| = {max_deviation:.3e} "
                         "(the map is not an isometry)")


@dataclass
class NaturalParam:
    space: NormSpace
    L: float
    s_grid: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    grid_size: int
    build_tol: float
    meta: dict = field(default_factory=dict)
    _chart: ArcLengthChart | None = field(default=None, repr=False)
    _pos: CubicSpline = field(default=None, repr=False)
    _tan: CubicSpline = field(default=None, repr=False)

    @property
    def perimeter(self) -> float:
        return 2.0 * self.L

    def reduce(self, s):
        return np.mod(s, self.perimeter)

    @property
    def chart(self) -> ArcLengthChart:
        if self._chart is None:
            raise BuildError("this parameterization has no chart backend "
                             "(it was tabulated from a pushed-forward sample set)")
        return self._chart

    def point_exact(self, s) -> np.ndarray:
        """Chart-backed r(s), shape (n, 2); accurate to quadrature tolerance."""
        return self.chart.point(self.chart.t_of_s(np.atleast_1d(s)))

    def tangent_exact(self, s) -> np.ndarray:
        """Chart-backed r'(s), shape (n, 2)."""
        return self.chart.unit_tangent(self.chart.t_of_s(np.atleast_1d(s)))

    def param_of_point(self, v: Vec2) -> float:
        """Parameter in [0, 2L) of a sphere point."""
        return float(self.chart.s_of_t(v.angle())[0])


def _build_splines(np_: NaturalParam):
    per = np_.perimeter
    xs = np.concatenate([np_.s_grid, [per]])
    np_._pos = CubicSpline(xs, np.vstack([np_.points, np_.points[:1]]),
                           bc_type="periodic", axis=0)
    np_._tan = CubicSpline(xs, np.vstack([np_.tangents, np_.tangents[:1]]),
                           bc_type="periodic", axis=0)


def build_natural_param(space: NormSpace, grid_size: int = 1024,
                        tol: float = 1e-9) -> NaturalParam:
    """Tabulate the natural parameterization r with r(0) = boundary_point(0)."""
    if not space.is_smooth:
        angle = space.corner_angle
        where = f" (corner at angle {angle:.9f})" if angle is not None else ""
        raise NonSmoothSpaceError(f"non-smooth space {space.label!r}{where}: "
                                  "no natural parameterization exists")
    if grid_size < 256:
        raise BuildError(f"grid_size must be >= 256, got {grid_size}")
    if grid_size % 2:
        grid_size += 1
    chart = ArcLengthChart(space, tol=tol)
    L = chart.half_length
    s_grid = np.arange(grid_size) * (2.0 * L / grid_size)
    t = chart.t_of_s(s_grid)
    points = chart.point(t)
    tangents = chart.unit_tangent(t)

    pn = space.gauge_many(points[:, 0], points[:, 1])
    tn = space.gauge_many(tangents[:, 0], tangents[:, 1])
    if np.max(np.abs(pn - 1.0)) > 1e-9 or np.max(np.abs(tn - 1.0)) > 1e-8:
        raise BuildError("sample table violates unit-norm invariants")
    anti = points + np.roll(points, -grid_size // 2, axis=0)
    anti_max = float(np.max(space.gauge_many(anti[:, 0], anti[:, 1])))
    if anti_max > 1e-7:
        raise BuildError(f"periodicity invariant ||r(s+L)+r(s)|| violated ({anti_max:.3e})")

    np_ = NaturalParam(space=space, L=L, s_grid=s_grid, points=points,
                       tangents=tangents, grid_size=grid_size, build_tol=tol,
                       meta={"orientation": "ccw", "base_point": "angle0",
                             "quad_error": chart.quad_error,
                             "antipodality_residual": anti_max},
                       _chart=chart)
    _build_splines(np_)
    return np_


def eval_r(np_: NaturalParam, s):
    """Cubic interpolation of r(s); 2L-periodic. Vec2 for scalar s, (n,2) for arrays."""
    scalar = np.isscalar(s) or np.ndim(s) == 0
    out = np_._pos(np_.reduce(np.atleast_1d(np.asarray(s, dtype=float))))
    return Vec2.from_array(out[0]) if scalar else out


def eval_r_prime(np_: NaturalParam, s):
    """Cubic interpolation of r'(s); 2L-periodic."""
    scalar = np.isscalar(s) or np.ndim(s) == 0
    out = np_._tan(np_.reduce(np.atleast_1d(np.asarray(s, dtype=float))))
    return Vec2.from_array(out[0]) if scalar else out


def pushforward_param(np_X: NaturalParam, f, validate_tol: float = 1e-6) -> NaturalParam:
    """Tabulation of f o r_X as a natural parameterization of the target sphere.

    Tangents are recomputed by central finite differences; the result is
    validated for unit self-speed in the target norm.
    """
    from .isometries import SphereIsometry, apply_many, verify_isometry

    if isinstance(f, SphereIsometry):
        distortion = verify_isometry(f, 256)
        if distortion > max(f.tolerance, 1e-8):
            raise UnitSpeedError(distortion)
        target = f.target
        fn = lambda pts: apply_many(f, pts)
    else:
        raise TypeError("pushforward_param expects a SphereIsometry")

    points = fn(np_X.points)
    h = 1e-5 * np_X.perimeter
    fwd = fn(np_X.point_exact(np_X.s_grid + h))
    bwd = fn(np_X.point_exact(np_X.s_grid - h))
    tangents = (fwd - bwd) / (2.0 * h)
    speeds = target.gauge_many(tangents[:, 0], tangents[:, 1])
    dev = float(np.max(np.abs(speeds - 1.0)))
    if dev > validate_tol:
        raise UnitSpeedError(dev)
    np_Y = NaturalParam(space=target, L=np_X.L, s_grid=np_X.s_grid.copy(),
                        points=points, tangents=tangents, grid_size=np_X.grid_size,
                        build_tol=np_X.build_tol,
                        meta={"orientation": "pushforward", "base_point": "f(r_X(0))",
                              "speed_deviation": dev},
                        _chart=None)
    _build_splines(np_Y)
    return np_Y


def write_samples_csv(np_: NaturalParam, path) -> None:
    """CSV dump of the sample table, 12 significant digits, LF endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write("# mink2d natural parameterization sample table\n")
        fh.write(f"# norm={np_.space.label} grid_size={np_.grid_size} "
                 f"L={np_.L:.12g} build_tol={np_.build_tol:.3g} "
                 f"orientation=ccw base_point=angle0\n")
        fh.write("s,px,py,tx,ty\n")
        for s, p, t in zip(np_.s_grid, np_.points, np_.tangents):
            fh.write(f"{s:.12g},{p[0]:.12g},{p[1]:.12g},{t[0]:.12g},{t[1]:.12g}\n")

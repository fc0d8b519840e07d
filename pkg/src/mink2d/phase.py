"""Phase shift of a natural parameterization and the supercurvatures P, T.

phase(s) is the smallest t > s with r(t) = r'(s). Because the boundary is
traversed counterclockwise, the position angle of r(t) is exactly the chart
parameter, so the root is located on the monotone angle coordinate: lift the
position angle of r'(s) into (chart(s), chart(s) + pi) and map it back through
the cumulative-arclength table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .natural_param import NaturalParam
from .norms import TWO_PI


class PhaseError(RuntimeError):
    pass


def _require_regular(np_: NaturalParam):
    if not np_.space.is_strictly_convex:
        raise PhaseError(f"phase shift needs a strictly convex space, got {np_.space.label!r} "
                         "(the defining root may be non-unique)")
    if not np_.space.is_smooth:
        raise PhaseError(f"phase shift needs a smooth space, got {np_.space.label!r}")


def _tangent_lift(np_: NaturalParam, s: np.ndarray):
    """Chart angle of s and the lifted position angle of r'(s) in (t, t + pi)."""
    chart = np_.chart
    t = chart.t_of_s(np.atleast_1d(s))
    w = chart.unit_tangent(t)
    tau = np.arctan2(w[:, 1], w[:, 0])
    lift = t + np.mod(tau - t, TWO_PI)
    return t, lift, w


def phase(np_: NaturalParam, s, tol: float = 1e-9):
    """Smallest t in (s, s + 2L] with r(t) = r'(s). Scalar in, scalar out."""
    _require_regular(np_)
    scalar = np.isscalar(s) or np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    _, lift, w = _tangent_lift(np_, s_arr)
    phi = np_.chart.s_of_t(lift)
    res = np_.chart.point(lift) - w
    res_max = float(np.max(np_.space.gauge_many(res[:, 0], res[:, 1])))
    if res_max > max(tol, 1e-10):
        raise PhaseError(f"phase residual ||r(phi) - r'(s)|| = {res_max:.3e} exceeds tol "
                         "(corrupted tangent data)")
    bad = phi <= s_arr
    if np.any(bad):
        raise PhaseError(f"no bracket with phi > s found at s={s_arr[bad][0]!r}")
    return float(phi[0]) if scalar else phi


def supercurvature(np_: NaturalParam, s):
    """(P, T) with r'(phase(s)) = -P * r(s) + T * r'(s).

    Scalar s yields a float pair; arrays yield array pairs.
    """
    _require_regular(np_)
    scalar = np.isscalar(s) or np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    _, lift, w = _tangent_lift(np_, s_arr)
    r = np_.point_exact(s_arr)
    rp_phi = np_.chart.unit_tangent(lift)
    det = r[:, 0] * w[:, 1] - r[:, 1] * w[:, 0]
    if np.any(np.abs(det) < 1e-10):
        raise PhaseError("frame (r(s), r'(s)) is degenerate (determinant below 1e-10)")
    alpha = (rp_phi[:, 0] * w[:, 1] - rp_phi[:, 1] * w[:, 0]) / det
    beta = (r[:, 0] * rp_phi[:, 1] - r[:, 1] * rp_phi[:, 0]) / det
    P, T = -alpha, beta
    return (float(P[0]), float(T[0])) if scalar else (P, T)


def phase_derivative(np_: NaturalParam, s: float, h: float | None = None) -> float:
    """Central difference estimate of phi'(s); non-negative by monotonicity."""
    if h is None:
        h = 1e-4 * np_.L
    if h <= 0:
        raise ValueError("step h must be positive")
    val = (phase(np_, s + h) - phase(np_, s - h)) / (2.0 * h)
    return max(val, 0.0)


@dataclass
class PhaseProfile:
    np_: NaturalParam
    s: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray  # NaN where the cross-scale estimates disagree
    P: np.ndarray
    T: np.ndarray
    meta: dict = field(default_factory=dict)

    def rows(self):
        for i in range(len(self.s)):
            pp = self.phi_prime[i]
            yield (self.s[i], self.phi[i], None if math.isnan(pp) else pp,
                   self.P[i], self.T[i])


def build_phase_profile(np_: NaturalParam, grid_size: int) -> PhaseProfile:
    """Tabulate phase, supercurvatures, and (where stable) phi' on a uniform grid.

    phi' is reported absent (NaN) when the estimates at steps 1e-3*L and
    1e-4*L disagree by more than 10% -- no extrapolation is attempted.
    """
    _require_regular(np_)
    s = np.arange(grid_size) * (np_.perimeter / grid_size)
    phi = phase(np_, s)
    P, T = supercurvature(np_, s)
    h1, h2 = 1e-3 * np_.L, 1e-4 * np_.L
    d1 = np.maximum((phase(np_, s + h1) - phase(np_, s - h1)) / (2.0 * h1), 0.0)
    d2 = np.maximum((phase(np_, s + h2) - phase(np_, s - h2)) / (2.0 * h2), 0.0)
    stable = np.abs(d1 - d2) <= 0.1 * np.maximum(np.abs(d2), 1e-12)
    phi_prime = np.where(stable, d2, np.nan)
    dphi = np.diff(phi)
    if np.any(dphi < -1e-9):
        bad = float(s[int(np.argmin(dphi)) + 1])
        raise PhaseError(f"phase tabulation is not monotone at s={bad:.9f}")
    return PhaseProfile(np_=np_, s=s, phi=phi, phi_prime=phi_prime, P=P, T=T,
                        meta={"grid_size": grid_size, "h_scales": (h1, h2)})


def write_phase_csv(profile: PhaseProfile, path) -> None:
    np_ = profile.np_
    with open(path, "w", newline="\n") as fh:
        fh.write("# mink2d phase profile\n")
        fh.write(f"# norm={np_.space.label} grid_size={profile.meta['grid_size']} "
                 f"L={np_.L:.12g} orientation=ccw base_point=angle0\n")
        fh.write("s,phi,phi_prime,P,T\n")
        for s, phi, pp, P, T in profile.rows():
            pp_s = "" if pp is None else f"{pp:.12g}"
            fh.write(f"{s:.12g},{phi:.12g},{pp_s},{P:.12g},{T:.12g}\n")

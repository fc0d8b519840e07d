"""Chord map, chord-length expansions, and moving-frame coefficients.

For a chord r(b) - r(a) = d * r(s) the closed-form expansion of the chord
length nu(eps) = ||r(b + eps) - r(a)|| is

    nu(eps) = d + x*eps + (u + rho*y^2/d)/2 * eps^2 + o(eps^2)

where r'(b) = x*r(s) + y*r'(s), r''(b) = u*r(s) + v*r'(s) and
r''(s) = -rho*r(s) + tau*r'(s). The curvature of the frame point enters only
through rho; mu''(0) = (u - nu''(0)) * d / y^2 recovers -P(s)*phi'(s), which
is how phi' is reconstructed from chord data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .geometry import Vec2
from .natural_param import NaturalParam, eval_r
from .norms import NormSpace, eval_norm
from .phase import supercurvature


class ChordError(RuntimeError):
    pass


class FrameDegenerateError(ChordError):
    pass


class FixedPointError(ChordError):
    pass


def _other_intersection(space: NormSpace, x: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Second intersection of the line x + R*direction with the unit sphere.

    The gauge along the line is convex with value 1 at t = 0; the second root
    straddles the line's gauge minimizer. Returns x itself at tangency.
    """
    def g(t):
        q = x + t * direction
        return float(space.gauge_many(np.array([q[0]]), np.array([q[1]]))[0]) - 1.0

    dn = float(space.gauge_many(np.array([direction[0]]), np.array([direction[1]]))[0])
    span = 2.2 / dn
    res = minimize_scalar(g, bounds=(-span, span), method="bounded",
                          options={"xatol": 1e-13})
    t_min = float(res.x)
    if g(t_min) > -1e-12 or abs(t_min) < 1e-9:
        return x.copy()  # tangential fixed point
    sign = 1.0 if t_min > 0 else -1.0
    step = abs(t_min)
    far = t_min + sign * step
    for _ in range(60):
        if g(far) > 0.0:
            break
        step *= 2.0
        far = t_min + sign * step
        if abs(far) > 1e6:
            raise ChordError("line-sphere intersection solver did not converge")
    lo, hi = (t_min, far) if sign > 0 else (far, t_min)
    t2 = brentq(g, lo, hi, xtol=1e-14)
    return x + t2 * direction


def chord_map(np_: NaturalParam, s: float, x_point: Vec2) -> Vec2:
    """The point theta(x) with {x, theta(x)} = sphere intersect (x + R*r(s))."""
    space = np_.space
    if not space.is_strictly_convex:
        raise ChordError("chord map needs a strictly convex space")
    if abs(eval_norm(space, x_point) - 1.0) > 1e-7:
        raise ChordError(f"x_point is not on the sphere (gauge {eval_norm(space, x_point):.9f})")
    direction = np_.point_exact(float(s))[0]
    out = _other_intersection(space, x_point.as_array(), direction)
    return Vec2.from_array(out)


def _frame_coords(basis0: np.ndarray, basis1: np.ndarray, vec: np.ndarray):
    det = basis0[0] * basis1[1] - basis0[1] * basis1[0]
    if abs(det) < 1e-10:
        raise FrameDegenerateError(f"frame determinant {det:.3e} below 1e-10")
    c0 = (vec[0] * basis1[1] - vec[1] * basis1[0]) / det
    c1 = (basis0[0] * vec[1] - basis0[1] * vec[0]) / det
    return c0, c1


def _second_derivative(np_: NaturalParam, s: float, h: float) -> np.ndarray:
    """r''(s) by Richardson-refined central differences of the chart tangent."""
    def d(step):
        return (np_.tangent_exact(s + step)[0] - np_.tangent_exact(s - step)[0]) / (2.0 * step)

    d1 = d(h)
    d2 = d(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


@dataclass(frozen=True)
class ChordFrameData:
    a: float
    b: float
    s: float
    d: float
    x: float
    y: float
    u: float
    v: float
    rho: float
    tau: float


def chord_frame_data(np_: NaturalParam, b: float, s: float,
                     fd_step: float | None = None) -> ChordFrameData:
    """Frame coefficients at the chord configuration (a, b, s), a derived from b.

    fd_step controls the second-derivative finite differences (default 1e-4*L);
    shrinking it exposes divergence at non-twice-differentiable parameters.
    """
    if fd_step is None:
        fd_step = 1e-4 * np_.L
    space = np_.space
    pb = np_.point_exact(float(b))[0]
    dirv = np_.point_exact(float(s))[0]
    q = _other_intersection(space, pb, dirv)
    diff = pb - q
    d = float(space.gauge_many(np.array([diff[0]]), np.array([diff[1]]))[0])
    if d < 1e-6:
        raise FixedPointError(f"r(b) is a fixed point of the chord map (d={d:.3e})")
    res_pos = diff - d * dirv
    res = float(space.gauge_many(np.array([res_pos[0]]), np.array([res_pos[1]]))[0])
    if res > 1e-7 * max(1.0, d):
        raise ChordError(f"chord condition r(b)-r(a) = d*r(s) violated (residual {res:.3e}); "
                         "for the opposite orientation use s + L")
    a = np_.param_of_point(Vec2.from_array(q))
    rs = dirv
    rps = np_.tangent_exact(float(s))[0]
    rpb = np_.tangent_exact(float(b))[0]
    x, y = _frame_coords(rs, rps, rpb)
    rpp_b = _second_derivative(np_, float(b), fd_step)
    u, v = _frame_coords(rs, rps, rpp_b)
    rpp_s = _second_derivative(np_, float(s), fd_step)
    c0, tau = _frame_coords(rs, rps, rpp_s)
    return ChordFrameData(a=a, b=float(b), s=float(s), d=d, x=float(x), y=float(y),
                          u=float(u), v=float(v), rho=float(-c0), tau=float(tau))


def nu(np_: NaturalParam, a: float, b: float, eps: float) -> float:
    """Chord length ||r(b + eps) - r(a)|| via the interpolated parameterization."""
    return eval_norm(np_.space, eval_r(np_, b + eps) - eval_r(np_, a))


def nu_derivatives_closed(cfd: ChordFrameData) -> tuple[float, float]:
    """Closed-form (nu'(0), nu''(0)) = (x, u + rho*y^2/d)."""
    return cfd.x, cfd.u + cfd.rho * cfd.y ** 2 / cfd.d


def nu_derivatives_fd(np_: NaturalParam, cfd: ChordFrameData,
                      step: float | None = None) -> tuple[float, float]:
    """5-point central finite differences of nu at eps = 0."""
    h = step if step is not None else 1e-3 * np_.perimeter
    vals = [nu(np_, cfd.a, cfd.b, k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12.0 * h)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12.0 * h * h)
    return d1, d2


def mu_eta(np_: NaturalParam, s: float, eps: float) -> tuple[float, float]:
    """Frame coordinates of r(s + eps) minus the affine part:
    r(s+eps) = (1 + mu)*r(s) + (eps + eta)*r'(s)."""
    rs = np_.point_exact(float(s))[0]
    rps = np_.tangent_exact(float(s))[0]
    p = np_.point_exact(float(s) + float(eps))[0]
    c0, c1 = _frame_coords(rs, rps, p)
    return c0 - 1.0, c1 - eps


def mu_second_fd(np_: NaturalParam, s: float, step: float | None = None) -> float:
    """5-point second derivative of mu at eps = 0."""
    h = step if step is not None else 1e-3 * np_.perimeter
    vals = [mu_eta(np_, s, k * h)[0] for k in (-2, -1, 0, 1, 2)]
    return (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12.0 * h * h)


def mu_second_closed(cfd: ChordFrameData, nu_second: float) -> float:
    """mu''(0) = (u - nu''(0)) * d / y^2."""
    if abs(cfd.y) < 1e-12:
        raise FrameDegenerateError("mu''(0) formula needs y != 0")
    return (cfd.u - nu_second) * cfd.d / cfd.y ** 2


def recover_phi_prime(cfd: ChordFrameData, nu_second: float, P: float) -> float:
    """phi'(s) = (nu''(0) - u) * d / (P * y^2), from mu''(0) = -P(s)*phi'(s)."""
    if abs(P) < 1e-12:
        raise ChordError("recover_phi_prime needs a nonzero radial supercurvature P")
    if abs(cfd.y) < 1e-12:
        raise FrameDegenerateError("recover_phi_prime needs y != 0")
    return (nu_second - cfd.u) * cfd.d / (P * cfd.y ** 2)


@dataclass(frozen=True)
class ExpansionReport:
    cfd: ChordFrameData
    nu0: float
    nu_prime_closed: float
    nu_second_closed: float
    nu_prime_fd: float
    nu_second_fd: float
    mu_second_closed: float
    mu_second_fd: float
    phi_prime_recovered: float


def expansion_report(np_: NaturalParam, b: float, s: float,
                     fd_step: float | None = None) -> ExpansionReport:
    cfd = chord_frame_data(np_, b, s, fd_step=fd_step)
    n1c, n2c = nu_derivatives_closed(cfd)
    n1f, n2f = nu_derivatives_fd(np_, cfd)
    m2c = mu_second_closed(cfd, n2c)
    m2f = mu_second_fd(np_, s)
    P, _ = supercurvature(np_, s)
    phi_rec = recover_phi_prime(cfd, n2f, P)
    return ExpansionReport(cfd=cfd, nu0=cfd.d,
                           nu_prime_closed=n1c, nu_second_closed=n2c,
                           nu_prime_fd=n1f, nu_second_fd=n2f,
                           mu_second_closed=m2c, mu_second_fd=m2f,
                           phi_prime_recovered=phi_rec)


def axis_params(np_: NaturalParam) -> np.ndarray:
    """Parameters of the four coordinate-axis points of the sphere."""
    angles = np.array([0.0, 0.5, 1.0, 1.5]) * math.pi
    return np.sort(np.mod(np_.chart.s_of_t(angles), np_.perimeter))


def _near_axis(np_: NaturalParam, s: float, margin: float) -> bool:
    per = np_.perimeter
    for ax in axis_params(np_):
        d = abs((s - ax + np_.L) % per - np_.L)
        if d < margin:
            return True
    return False


def chord_sweep(np_: NaturalParam, n: int, rng: np.random.Generator,
                min_d: float = 0.1, exclude_axis_margin: float | None = None):
    """Admissible chord configurations (b, s): b sampled uniformly, a derived
    via the chord map, configurations with d < min_d discarded.

    exclude_axis_margin (in parameter units) drops configurations whose b, a,
    or s sit near the axis parameters (lp p < 2 non-regular points).
    """
    configs = []
    space = np_.space
    per = np_.perimeter
    attempts = 0
    while len(configs) < n and attempts < 100 * n:
        attempts += 1
        b = float(rng.uniform(0.0, per))
        psi = float(rng.uniform(0.0, 2.0 * math.pi))
        pb = np_.point_exact(b)[0]
        direction = np.array([math.cos(psi), math.sin(psi)])
        q = _other_intersection(space, pb, direction)
        diff = pb - q
        d = float(space.gauge_many(np.array([diff[0]]), np.array([diff[1]]))[0])
        if d < min_d:
            continue
        ang = math.atan2(diff[1], diff[0]) % (2.0 * math.pi)
        s = float(np.mod(np_.chart.s_of_t(ang), per)[0])
        if exclude_axis_margin is not None:
            if any(_near_axis(np_, v, exclude_axis_margin) for v in (b, s)):
                continue
        configs.append((b, s))
    if len(configs) < n:
        raise ChordError(f"could not generate {n} admissible chords ({len(configs)} found)")
    return configs


@dataclass(frozen=True)
class WitnessReport:
    """Max special-direction residual over a chord sweep. A small maximum is
    witness evidence, not a verified special direction (the definition
    quantifies over all isometries onto all targets)."""
    s: float
    n_checked: int
    max_residual: float
    worst_b: float


def special_direction_witness(f, np_: NaturalParam, s: float, n_chords: int,
                              seed: int = 42) -> WitnessReport:
    """Check f(r(b)) - f(r(a)) = ||r(b)-r(a)|| * f(r(s)) over n_chords chords
    parallel to r(s)."""
    from .isometries import apply_many, verify_isometry

    distortion = verify_isometry(f, 128)
    if distortion > max(f.tolerance, 1e-8):
        raise ChordError(f"witness needs an isometry; distortion {distortion:.3e}")
    space = np_.space
    target = f.target
    dirv = np_.point_exact(float(s))[0]
    f_dir = apply_many(f, dirv[None, :])[0]
    rng = np.random.default_rng(seed)
    per = np_.perimeter
    checked = 0
    worst = (0.0, 0.0)
    attempts = 0
    while checked < n_chords and attempts < 100 * n_chords:
        attempts += 1
        b = float(rng.uniform(0.0, per))
        pb = np_.point_exact(b)[0]
        q = _other_intersection(space, pb, dirv)
        diff = pb - q
        d = float(space.gauge_many(np.array([diff[0]]), np.array([diff[1]]))[0])
        if d < 0.1:
            continue
        res_pos = diff - d * dirv
        if float(space.gauge_many(np.array([res_pos[0]]), np.array([res_pos[1]]))[0]) > 1e-6 * d:
            continue  # chord oriented along -r(s); skip
        img = apply_many(f, np.vstack([pb, q]))
        r = img[0] - img[1] - d * f_dir
        resid = float(target.gauge_many(np.array([r[0]]), np.array([r[1]]))[0])
        if resid > worst[0]:
            worst = (resid, b)
        checked += 1
    if checked < n_chords:
        raise ChordError(f"could not collect {n_chords} chords parallel to r({s})")
    return WitnessReport(s=float(s), n_checked=checked,
                         max_residual=worst[0], worst_b=worst[1])


def write_expansion_csv(reports: list[ExpansionReport], np_: NaturalParam, path) -> None:
    reports = sorted(reports, key=lambda r: r.cfd.b)
    with open(path, "w", newline="\n") as fh:
        fh.write("# mink2d chord expansion report\n")
        fh.write(f"# norm={np_.space.label} grid_size={np_.grid_size} L={np_.L:.12g} "
                 f"orientation=ccw base_point=angle0\n")
        fh.write("b,a,s,d,x,y,u,v,rho,tau,nu1_closed,nu1_fd,nu2_closed,nu2_fd,"
                 "mu2_closed,mu2_fd,phi_prime_rec\n")
        for r in reports:
            c = r.cfd
            vals = (c.b, c.a, c.s, c.d, c.x, c.y, c.u, c.v, c.rho, c.tau,
                    r.nu_prime_closed, r.nu_prime_fd, r.nu_second_closed,
                    r.nu_second_fd, r.mu_second_closed, r.mu_second_fd,
                    r.phi_prime_recovered)
            fh.write(",".join(f"{v:.12g}" for v in vals) + "\n")

"""Finite-scale regularity diagnostics for the phase shift.

These are evidence-only tools: finite scales cannot prove non-Lipschitzness,
only display quotient growth, and the smoothness proxy never claims the
absolute-smoothness trichotomy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .natural_param import NaturalParam
from .phase import phase

# Dyadic scales descending two octaves per step: the slowest physically
# occurring quotient growth on the built-in fixtures is ~sqrt(2) per halving
# (lp sphere with p = 1.5 at the axis points), which the verdict factor 1.5
# would miss at single-octave steps.
SCALE_FACTOR = 4.0
DIVERGING_FACTOR = 1.5
BOUNDED_FACTOR = 1.2


@dataclass(frozen=True)
class LipschitzScan:
    s: float
    scales: tuple[float, ...]
    quotients: tuple[float, ...]
    verdict: str  # 'bounded' | 'diverging' | 'indeterminate'


def lipschitz_scan(np_: NaturalParam, s: float, n_scales: int = 5,
                   base_scale: float | None = None) -> LipschitzScan:
    """Symmetric difference quotients of the phase shift at descending scales.

    Verdict 'diverging' requires the quotients of the last three scales to
    grow by a factor >= 1.5 per step; 'bounded' requires them to have
    stabilized (growth <= 1.2 per step); anything else is 'indeterminate'.
    """
    if n_scales < 4:
        raise ValueError(f"n_scales must be >= 4, got {n_scales}")
    base = base_scale if base_scale is not None else 1e-2 * np_.L
    scales = tuple(base / SCALE_FACTOR ** k for k in range(n_scales))
    hs = np.asarray(scales)
    quots = np.abs(phase(np_, s + hs) - phase(np_, s - hs)) / (2.0 * hs)
    q = tuple(float(v) for v in quots)
    tiny = 1e-300
    r1 = q[-2] / max(q[-3], tiny)
    r2 = q[-1] / max(q[-2], tiny)
    if r1 >= DIVERGING_FACTOR and r2 >= DIVERGING_FACTOR:
        verdict = "diverging"
    elif r1 <= BOUNDED_FACTOR and r2 <= BOUNDED_FACTOR:
        verdict = "bounded"
    else:
        verdict = "indeterminate"
    return LipschitzScan(s=float(s), scales=scales, quotients=q, verdict=verdict)


@dataclass
class SmoothnessProxyReport:
    grid_size: int
    diverging_params: list[float]
    clusters: list[list[float]]
    verdict: str  # 'consistent with absolutely smooth' | 'suspect'
    note: str = ("finite-scale heuristic: quotient growth at the scanned scales "
                 "is evidence, not a certification of (non-)absolute smoothness")
    scans: list = field(default_factory=list, repr=False)


def absolute_smoothness_proxy(np_: NaturalParam, grid_size: int,
                              n_scales: int = 5) -> SmoothnessProxyReport:
    """Scan the phase-shift difference quotients over a uniform grid and
    cluster the diverging parameters."""
    if not (np_.space.is_strictly_convex and np_.space.is_smooth):
        raise ValueError("proxy needs a strictly convex smooth space")
    per = np_.perimeter
    s_grid = np.arange(grid_size) * (per / grid_size)
    scans = [lipschitz_scan(np_, float(s), n_scales) for s in s_grid]
    div_idx = [i for i, sc in enumerate(scans) if sc.verdict == "diverging"]
    clusters: list[list[float]] = []
    if div_idx:
        groups = [[div_idx[0]]]
        for i in div_idx[1:]:
            if i - groups[-1][-1] <= 2:
                groups[-1].append(i)
            else:
                groups.append([i])
        # wrap-around: merge first and last group if cyclically adjacent
        if len(groups) > 1 and (div_idx[0] + grid_size) - div_idx[-1] <= 2:
            groups[0] = groups.pop() + groups[0]
        clusters = [[float(s_grid[i]) for i in g] for g in groups]
    diverging = [float(s_grid[i]) for i in div_idx]
    verdict = ("consistent with absolutely smooth"
               if len(diverging) <= grid_size / 100 else "suspect")
    return SmoothnessProxyReport(grid_size=grid_size, diverging_params=diverging,
                                 clusters=clusters, verdict=verdict, scans=scans)


def write_scans_csv(scans: list[LipschitzScan], np_: NaturalParam, path) -> None:
    n = max(len(sc.quotients) for sc in scans)
    with open(path, "w", newline="\n") as fh:
        fh.write("# mink2d phase-shift Lipschitz scans\n")
        fh.write(f"# norm={np_.space.label} L={np_.L:.12g} scale_factor={SCALE_FACTOR:g} "
                 f"orientation=ccw base_point=angle0\n")
        fh.write("s,verdict," + ",".join(f"q{i + 1}" for i in range(n)) + "\n")
        for sc in scans:
            qs = ",".join(f"{q:.12g}" for q in sc.quotients)
            fh.write(f"{sc.s:.12g},{sc.verdict},{qs}\n")

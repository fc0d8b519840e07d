"""Static SVG artifacts: sphere with tangent field, phase-shift graph.

Hand-rolled SVG keeps the output byte-deterministic for a given input.
"""
from __future__ import annotations

import numpy as np

from .natural_param import NaturalParam
from .phase import PhaseProfile

_HEADER = ('<?xml version="1.0" encoding="UTF-8"?>\n'
           '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           'viewBox="0 0 {w} {h}">\n')


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def write_sphere_svg(np_: NaturalParam, path, n_glyphs: int = 32) -> None:
    w = h = 600
    scale = w / 3.0  # world window [-1.5, 1.5]^2

    def to_px(p):
        return (w / 2.0 + scale * p[0], h / 2.0 - scale * p[1])

    pts = np.vstack([np_.points, np_.points[:1]])
    poly = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (to_px(p) for p in pts))
    lines = [_HEADER.format(w=w, h=h)]
    lines.append(f"<!-- norm={np_.space.label} grid_size={np_.grid_size} "
                 f"L={np_.L:.12g} orientation=ccw base_point=angle0 -->\n")
    lines.append(f'<line x1="0" y1="{h // 2}" x2="{w}" y2="{h // 2}" stroke="#ddd"/>\n')
    lines.append(f'<line x1="{w // 2}" y1="0" x2="{w // 2}" y2="{h}" stroke="#ddd"/>\n')
    lines.append(f'<polyline points="{poly}" fill="none" stroke="#1f77b4" stroke-width="2"/>\n')
    stride = max(1, np_.grid_size // n_glyphs)
    for i in range(0, np_.grid_size, stride):
        p = np_.points[i]
        t = np_.tangents[i]
        x0, y0 = to_px(p)
        x1, y1 = to_px(p + 0.15 * t)
        lines.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
                     'stroke="#d62728" stroke-width="1"/>\n')
    lines.append("</svg>\n")
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)


def write_phase_svg(profile: PhaseProfile, path) -> None:
    w, h = 600, 400
    margin = 40
    s = profile.s
    y = profile.phi - profile.s
    ymin, ymax = float(np.min(y)), float(np.max(y))
    if ymax - ymin < 1e-12:
        ymin -= 0.5
        ymax += 0.5
    sx = (w - 2 * margin) / (s[-1] - s[0] if s[-1] > s[0] else 1.0)
    sy = (h - 2 * margin) / (ymax - ymin)
    pts = " ".join(f"{_fmt(margin + sx * (si - s[0]))},{_fmt(h - margin - sy * (yi - ymin))}"
                   for si, yi in zip(s, y))
    np_ = profile.np_
    with open(path, "w", newline="\n") as fh:
        fh.write(_HEADER.format(w=w, h=h))
        fh.write(f"<!-- norm={np_.space.label} L={np_.L:.12g} graph of phi(s)-s -->\n")
        fh.write(f'<rect x="{margin}" y="{margin}" width="{w - 2 * margin}" '
                 f'height="{h - 2 * margin}" fill="none" stroke="#999"/>\n')
        fh.write(f'<text x="{margin}" y="{margin - 10}" font-size="12">'
                 f"phi(s)-s, norm={np_.space.label}, range [{ymin:.6g}, {ymax:.6g}]</text>\n")
        fh.write(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>\n')
        fh.write("</svg>\n")

"""Self-arclength chart of a smooth unit sphere.

Cumulative arclength s(t) = int_0^t ||d/dtau boundary_point(tau)|| dtau is
computed by composite Gauss-Legendre quadrature with global node doubling
until the 10-vs-21-point estimates agree to the build tolerance. The inverse
t(s) uses a vectorized Newton iteration seeded from the node table, with a
bisection fallback for stragglers.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .norms import TWO_PI, NormSpace, chart_points, chart_velocity

_GL10 = np.polynomial.legendre.leggauss(10)
_GL21 = np.polynomial.legendre.leggauss(21)


class QuadratureError(RuntimeError):
    """Adaptive arclength quadrature failed to reach the requested tolerance."""


class ArcLengthChart:
    def __init__(self, space: NormSpace, tol: float = 1e-9,
                 min_nodes: int = 4096, max_nodes: int = 1 << 20):
        self.space = space
        self.tol = float(tol)
        m = min_nodes
        while True:
            nodes = np.linspace(0.0, TWO_PI, m + 1)
            seg10 = self._composite(nodes, *_GL10)
            seg21 = self._composite(nodes, *_GL21)
            err = float(np.sum(np.abs(seg21 - seg10)))
            if err < self.tol:
                break
            if m >= max_nodes:
                raise QuadratureError(
                    f"arclength quadrature stalled at {m} nodes (error {err:.3e} > tol {self.tol:.3e})")
            m *= 2
        self.nodes = nodes
        self.segments = seg21
        self.prefix = np.concatenate([[0.0], np.cumsum(seg21)])
        self.total = float(self.prefix[-1])
        self.half_length = self.total / 2.0
        self.quad_error = err

    def speed(self, t: np.ndarray) -> np.ndarray:
        v = chart_velocity(self.space, np.asarray(t, dtype=float))
        return self.space.gauge_many(v[..., 0], v[..., 1])

    def _composite(self, nodes: np.ndarray, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        a = nodes[:-1]
        h = np.diff(nodes)
        pts = a[:, None] + 0.5 * (x + 1.0)[None, :] * h[:, None]
        sp = self.speed(pts.ravel()).reshape(pts.shape)
        return 0.5 * h * (sp @ w)

    def point(self, t: np.ndarray) -> np.ndarray:
        return chart_points(self.space, np.asarray(t, dtype=float))

    def unit_tangent(self, t: np.ndarray) -> np.ndarray:
        v = chart_velocity(self.space, np.asarray(t, dtype=float))
        return v / self.space.gauge_many(v[..., 0], v[..., 1])[..., None]

    def s_of_t(self, t) -> np.ndarray:
        """Lifted cumulative arclength at chart angle t (monotone, s(t+2pi)=s(t)+2L)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.floor(t / TWO_PI)
        tt = t - k * TWO_PI
        j = np.clip(np.searchsorted(self.nodes, tt, side="right") - 1, 0, len(self.nodes) - 2)
        a = self.nodes[j]
        s = self.prefix[j] + self._partial(a, tt) + k * self.total
        return s

    def _partial(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        x, w = _GL21
        h = b - a
        pts = a[:, None] + 0.5 * (x + 1.0)[None, :] * h[:, None]
        sp = self.speed(pts.ravel()).reshape(pts.shape)
        return 0.5 * h * (sp @ w)

    def t_of_s(self, s) -> np.ndarray:
        """Inverse of s_of_t by Newton iteration with bisection fallback."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        k = np.floor(s / self.total)
        ss = s - k * self.total
        t = np.interp(ss, self.prefix, self.nodes)
        converged = np.zeros(len(t), dtype=bool)
        for _ in range(60):
            f = self.s_of_t(t) - ss
            converged = np.abs(f) < 1e-13 * max(1.0, self.total)
            if converged.all():
                break
            t = np.clip(t - f / np.maximum(self.speed(t), 1e-300), 0.0, TWO_PI)
        if not converged.all():
            for i in np.nonzero(~converged)[0]:
                t[i] = brentq(lambda u: float(self.s_of_t(u)[0]) - ss[i],
                              0.0, TWO_PI, xtol=1e-14)
        return t + k * TWO_PI

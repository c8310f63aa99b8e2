"""Collapsing family of positively curved metrics on ``S^{p+q-1}``.

``h(t) = c(t) * (dr^2 + cos^2 g_{S^{p-1}} + phi_t^2 g_{S^{q-1}})`` on [0, pi/2],
with ``c(t) = max{1-t, t}``.  As ``t`` falls the second fibre shrinks while
the curvature operator stays at least 1.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .geometry import HALF_PI, DoublyWarpedMetric, Profile, min_curvature, volume
from .warp import check_t, warp_profile

CERTIFICATION_TOL = 1e-6


def link_scale(t):
    t = check_t(t)
    return max(1.0 - t, t)


def _check_dims(p, q):
    if int(p) != p or int(q) != q or p < 2 or q < 2:
        raise ParameterError(f"p and q must be integers >= 2, got p={p!r}, q={q!r}")
    return int(p), int(q)


@dataclass(frozen=True)
class LinkMetric:
    t: float
    delta: float
    metric: DoublyWarpedMetric
    warp: object

    @property
    def scale(self):
        return self.metric.scale

    @property
    def p(self):
        return self.metric.p

    @property
    def q(self):
        return self.metric.q

    def fiber_sup(self, grid_size=1024):
        """``sup_r sqrt(c) * phi_t(r)``, the largest radius of the second fibre."""
        r = np.linspace(0.0, HALF_PI, int(grid_size) + 1)
        return math.sqrt(self.scale) * float(np.max(self.warp.derivatives(r)[0]))

    def summary(self, grid_size=1024):
        m, at, _ = min_curvature(self.metric, grid_size)
        return {
            "p": self.p,
            "q": self.q,
            "t": self.t,
            "delta": self.delta,
            "scale": self.scale,
            "volume": link_volume(self.p, self.q, self.t),
            "min_curvature": m,
            "argmin_r": at,
        }


@lru_cache(maxsize=256)
def build_link(p, q, t):
    """The metric ``h(t)`` on ``S^{p+q-1}``.

    Raises
    ------
    ParameterError
        For ``p < 2``, ``q < 2`` or ``t`` outside (0, 1].
    SelectionError
        If no cutoff parameter is admissible for ``t``.
    """
    p, q = _check_dims(p, q)
    t = check_t(t)
    w = warp_profile(t)
    metric = DoublyWarpedMetric(p, q, HALF_PI, Profile.cos(), Profile.from_warp(w), link_scale(t))
    return LinkMetric(t=t, delta=w.delta, metric=metric, warp=w)


@lru_cache(maxsize=1024)
def link_volume(p, q, t, tol=1e-12):
    return volume(build_link(p, q, t).metric, tol=tol)


def collapse_diagnostic(p, q, t_grid, grid_size=1024):
    """Second-fibre size along ``t_grid``.

    Each row holds ``t``, the scaled fibre sup, the bound ``3t`` valid for
    ``r > t`` and the total bound ``4t``.  Rows come back in the order given.
    """
    rows = []
    for t in t_grid:
        link = build_link(p, q, t)
        rows.append({"t": link.t, "sup": link.fiber_sup(grid_size),
                     "bound_far": 3.0 * link.t, "bound": 4.0 * link.t})
    return rows


@dataclass(frozen=True)
class NormalizedLink:
    """``h(t)`` rescaled by ``min{1, c_m(t)}``, so its volume is capped by that of ``h(1/m)``."""

    m: int
    t: float
    c_m: float
    link: LinkMetric
    target_volume: float
    tol: float = 1e-12

    @property
    def effective_scale(self):
        return min(1.0, self.c_m) * self.link.scale

    @property
    def metric(self):
        return self.link.metric.rescaled(min(1.0, self.c_m))

    @property
    def volume(self):
        factor = min(1.0, self.c_m) ** (self.link.metric.dimension / 2)
        return factor * link_volume(self.link.p, self.link.q, self.t, self.tol)


def volume_normalization(p, q, m, t, tol=1e-12):
    """``c_m(t) = (Vol h(1/m) / Vol h(t))^{2/(p+q-1)}`` and the rescaled link."""
    p, q = _check_dims(p, q)
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m!r}")
    m = int(m)
    t = check_t(t)
    target = link_volume(p, q, 1.0 / m, tol)
    own = link_volume(p, q, t, tol)
    c_m = (target / own) ** (2.0 / (p + q - 1))
    return NormalizedLink(m=m, t=t, c_m=c_m, link=build_link(p, q, t), target_volume=target,
                          tol=tol)

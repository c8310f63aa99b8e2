"""Warping functions interpolating between ``sin`` and ``t * sin``.

For ``t`` in (0, 1] the warp is

    phi_t(r) = int_0^r (t + (1 - t) chi(x)) cos(x) dx,      chi = chi_{delta(t)}.

Integrating the cutoff part by parts gives

    phi_t(r) = sin(r) * (t + (1 - t) * (chi(r) + J(r))),
    J(r)     = int_0^r -chi'(x) sin(x) dx / sin(r),

which is how values are computed here: ``J`` comes from the ratio quadrature
in :mod:`ricci_links.cutoff`, so ``phi_t / sin`` is obtained with relative
accuracy even at radii far below the cutoff's transition.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .cutoff import HALF_PI, CutoffFamily, eval_cutoff, ratio_profile
from .errors import ParameterError, SelectionError

# Candidate cutoff parameters 1, 1/2, 1/4, ...
MAX_HALVINGS = 48
WARP_TOL = 1e-13


def check_t(t):
    t = float(t)
    if not (0.0 < t <= 1.0) or not math.isfinite(t):
        raise ParameterError(f"t must lie in (0, 1], got {t!r}")
    return t


def ratio_bound(t):
    """``min{t^2/(1-t), t}``, read as 1 at ``t = 1``."""
    t = check_t(t)
    if t == 1.0:
        return 1.0
    return min(t * t / (1.0 - t), t)


def candidate_deltas(max_halvings=MAX_HALVINGS):
    return [2.0 ** -k for k in range(max_halvings + 1)]


def check_conditions(t, delta, n_y=1200, n_x=800, tol=1e-10):
    """Check both selection conditions for one ``(t, delta)``.

    Returns
    -------
    dict
        ``cutoff_at_t`` and ``ratio_sup`` with their bounds and pass flags.
    """
    t = check_t(t)
    chi_t, _ = eval_cutoff(delta, t)
    sup = ratio_profile(delta, tol, n_y, n_x).sup
    bound = ratio_bound(t)
    return {
        "cutoff_at_t": chi_t,
        "cutoff_ok": chi_t <= t,
        "ratio_sup": sup,
        "ratio_bound": bound,
        "ratio_ok": sup <= bound,
    }


@lru_cache(maxsize=1024)
def _select(t, cap, n_y, n_x):
    last = None
    for delta in candidate_deltas():
        if delta > cap:
            continue
        c = check_conditions(t, delta, n_y, n_x)
        if c["cutoff_ok"] and c["ratio_ok"]:
            return delta
        last = (delta, "cutoff" if not c["cutoff_ok"] else "ratio", c)
    if last is None:
        raise SelectionError(f"no candidate delta below cap {cap}", condition=None, delta=cap)
    delta, cond, c = last
    detail = (f"chi(t) = {c['cutoff_at_t']:.3e} > t" if cond == "cutoff"
              else f"ratio sup {c['ratio_sup']:.3e} > {c['ratio_bound']:.3e}")
    raise SelectionError(f"no delta >= {delta:g} works for t = {t}: {detail}",
                         condition=cond, delta=delta)


def select_delta(t, cap=1.0, n_y=1200, n_x=800):
    """Largest ``delta = 2**-k`` (not above ``cap``) meeting both conditions.

    The conditions are ``chi_delta(t) <= t`` and
    ``J_delta(r) <= min{t^2/(1-t), t}`` on the verification grid.

    Raises
    ------
    SelectionError
        If no candidate works; ``condition`` names the one that failed for
        the smallest candidate tried.
    """
    return _select(check_t(t), float(cap), int(n_y), int(n_x))


def select_delta_sweep(ts, n_y=1200, n_x=800):
    """Selections for a whole list of ``t``, capped so ``delta`` never grows as ``t`` falls.

    Returns a dict ``{t: delta}``.
    """
    out = {}
    cap = 1.0
    for t in sorted({check_t(t) for t in ts}, reverse=True):
        cap = select_delta(t, cap, n_y, n_x)
        out[t] = cap
    return out


@dataclass(frozen=True)
class WarpProfile:
    """``phi_t`` for fixed ``t`` with closed-form first and second derivatives."""

    t: float
    delta: float = None
    tol: float = WARP_TOL
    n_y: int = field(default=1200, repr=False)
    n_x: int = field(default=800, repr=False)

    def __post_init__(self):
        check_t(self.t)
        if self.delta is None:
            object.__setattr__(self, "delta", select_delta(self.t, n_y=self.n_y, n_x=self.n_x))

    @cached_property
    def cutoff(self):
        return CutoffFamily(self.delta)

    @cached_property
    def ratio_table(self):
        return ratio_profile(self.delta, self.tol, self.n_y, self.n_x)

    def ratio(self, r):
        """``J(r)``; zero at ``r = 0``."""
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        out = np.zeros_like(flat)
        pos = flat > 0.0
        if np.any(pos):
            out[pos] = self.ratio_table.at(np.log(flat[pos]))
        return out.reshape(r.shape)

    def __call__(self, r):
        return self.derivatives(r)

    def derivatives(self, r):
        """Return ``(phi, phi', phi'')`` as arrays shaped like ``r``."""
        r = np.asarray(r, dtype=float)
        if np.any((r < 0.0) | (r > HALF_PI * (1 + 1e-15))):
            raise ParameterError("r must lie in [0, pi/2]")
        t = self.t
        chi, dchi = self.cutoff.value_and_derivative(r)
        weight = t + (1.0 - t) * chi
        if t == 1.0:
            phi = np.sin(r)
        else:
            phi = np.sin(r) * (weight + (1.0 - t) * self.ratio(r))
        dphi = np.cos(r) * weight
        ddphi = -np.sin(r) * weight + (1.0 - t) * dchi * np.cos(r)
        return phi, dphi, ddphi

    def one_minus_slope_sq(self, r):
        """``1 - phi'(r)**2 = sin^2 + cos^2 (1 - w)(1 + w)`` with ``w = t + (1-t) chi``."""
        r = np.asarray(r, dtype=float)
        chi, _ = self.cutoff.value_and_derivative(r)
        w = self.t + (1.0 - self.t) * chi
        gap = (1.0 - self.t) * (1.0 - chi)
        return np.sin(r) ** 2 + np.cos(r) ** 2 * gap * (1.0 + w)

    def tan_slope(self, r):
        """``tan(r) * phi'(r)``, finite up to and including pi/2."""
        r = np.asarray(r, dtype=float)
        chi, _ = self.cutoff.value_and_derivative(r)
        return np.sin(r) * (self.t + (1.0 - self.t) * chi)


@lru_cache(maxsize=256)
def warp_profile(t, delta=None):
    return WarpProfile(check_t(t), delta)


def eval_warp(t, r):
    """``(phi_t(r), phi_t'(r), phi_t''(r))`` as floats."""
    r = float(r)
    if not 0.0 <= r <= HALF_PI:
        raise ParameterError(f"r must lie in [0, pi/2], got {r!r}")
    phi, dphi, ddphi = warp_profile(check_t(t)).derivatives(np.array([r]))
    return float(phi[0]), float(dphi[0]), float(ddphi[0])


@dataclass(frozen=True)
class WarpReport:
    """Signed margins of the warp inequalities over a grid.

    ``curvature_gap`` and ``slope_margin`` pass when non-negative,
    ``collapse_excess`` passes when non-positive.  Each ``*_at`` field is
    the worst-offending radius.
    """

    t: float
    delta: float
    curvature_gap: float
    curvature_gap_at: float
    slope_margin: float
    slope_margin_at: float
    collapse_excess: float
    collapse_excess_at: float
    boundary: dict

    def passes(self, tol=1e-8):
        b = self.boundary
        return (self.curvature_gap >= -tol and self.slope_margin >= -tol
                and self.collapse_excess <= tol
                and max(b["phi_0"], b["dphi_0"], b["ddphi_0"], b["dphi_end"]) <= tol
                and b["phi_end_minus_t"] >= -tol)


def verify_warp_properties(t, grid_size=1024, profile=None):
    """Check the warp inequalities on ``grid_size`` interior points plus pi/2.

    The three margins are ``-phi''/phi - tan*phi'/phi``,
    ``tan*phi'/phi - max{t, 1-t}`` and ``phi - 3 t sin`` (for ``r > t``).
    """
    t = check_t(t)
    if grid_size < 2:
        raise ParameterError("grid_size must be at least 2")
    w = profile if profile is not None else warp_profile(t)
    r = np.linspace(0.0, HALF_PI, grid_size + 1)[1:]
    phi, dphi, ddphi = w.derivatives(r)
    tan_term = w.tan_slope(r) / phi
    gap = -ddphi / phi - tan_term
    margin = tan_term - max(t, 1.0 - t)
    excess = np.where(r > t, phi - 3.0 * t * np.sin(r), -np.inf)

    i, j, k = int(np.argmin(gap)), int(np.argmin(margin)), int(np.argmax(excess))
    p0, d0, dd0 = (float(v[0]) for v in w.derivatives(np.array([0.0])))
    pe, de, _ = (float(v[0]) for v in w.derivatives(np.array([HALF_PI])))
    boundary = {
        "phi_0": abs(p0),
        "dphi_0": abs(d0 - 1.0),
        "ddphi_0": abs(dd0),
        "dphi_end": abs(de),
        "phi_end_minus_t": pe - t,
    }
    collapse = float(excess[k]) if np.isfinite(excess[k]) else -math.inf
    return WarpReport(t=t, delta=w.delta,
                      curvature_gap=float(gap[i]), curvature_gap_at=float(r[i]),
                      slope_margin=float(margin[j]), slope_margin_at=float(r[j]),
                      collapse_excess=collapse, collapse_excess_at=float(r[k]),
                      boundary=boundary)

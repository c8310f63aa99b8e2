"""Asymptotically conical expanders by shooting on the vertex curvature.

For ``kappa > 0`` the expanding profile opens up like a cone,
``w'(r) -> c(kappa)`` with ``w' - c ~ A / r^2``, and ``c`` decreases from 1
to 0 as ``kappa`` grows.  :func:`solve_expander` inverts that map.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BracketError, MonotonicityError, NumericalError, ParameterError,
                     ProfileTooShortError)
from .geometry import sphere_constant
from .quadrature import adaptive_simpson
from .soliton import (ODE_REL_TOL, R0, SolitonKind, _initial_state, _raise_for, _solve,
                      integrate_soliton)

SHOOTING_TOL = 1e-6
KAPPA_LOW = 1e-6
KAPPA_HIGH = 1.0
KAPPA_CEILING = 1e8
# The tail is resolved once r_max is beyond this, so scanning starts here.
TAIL_START = 20.0
RADIUS_CAPS = (1e5, 1e6, 1e7)


def tail_curvature(solution, r):
    """``|w''(r)|`` by a backward difference of ``w'`` with step ``0.02 r``.

    Evaluating ``w''`` from the equation multiplies state errors by
    ``f' ~ r/2``; the slope itself is tracked accurately, so differencing it
    is the better estimate far out.  The stencil only looks inward, so the
    estimate is available at the end of the profile.
    """
    r = np.asarray(r, dtype=float)
    h = 0.02 * r
    d0, d1, d2 = (solution(r - k * h)[1] for k in (0, 1, 2))
    # slopes are 1 - s
    return np.abs(-3.0 * d0 + 4.0 * d1 - d2) / (2.0 * h)


def _flat_radius(n, kappa, tol, rtol, start=TAIL_START):
    """Smallest scan radius beyond which ``|w''| r <= tol`` holds throughout."""
    eps = SolitonKind.EXPANDING.epsilon
    y0 = _initial_state(n, eps, kappa, R0)
    for cap in RADIUS_CAPS:
        if cap <= start:
            continue
        sol = _solve(n, eps, kappa, R0, y0, cap, rtol)
        _raise_for(sol)
        scan = np.geomspace(start, cap, int(8 * math.log2(cap / start)) + 2)
        flat = tail_curvature(sol.sol, scan) * scan <= tol
        if flat[-1]:
            bad = np.flatnonzero(~flat)
            return float(scan[bad[-1] + 1]) if bad.size else float(scan[0])
    raise ProfileTooShortError(f"|w''| r still above {tol:g} at r = {RADIUS_CAPS[-1]:g}",
                               estimates=None)


def _slope_event(r, y):
    return 1.0 - y[1]


_slope_event.terminal = True
_slope_event.direction = -1


def _slope_at(n, kappa, r_max, rtol):
    """``w'(r_max)``; 0 if the slope dies out first."""
    eps = SolitonKind.EXPANDING.epsilon
    sol = _solve(n, eps, kappa, R0, _initial_state(n, eps, kappa, R0), r_max, rtol,
                 events=[_slope_event])
    if sol.status == 1:
        return 0.0
    _raise_for(sol)
    return float(1.0 - sol.y[1, -1])


@dataclass
class ShootingResult:
    n: int
    c: float
    kappa_star: float
    achieved_slope: float
    r_max: float
    profile: object = field(repr=False)
    history: list = field(default_factory=list, repr=False)

    @property
    def R_origin(self):
        return self.n * (self.n - 1) * self.kappa_star

    @property
    def slope_err(self):
        return abs(self.achieved_slope - self.c)

    @property
    def avr(self):
        return closed_form_avr(self.n, self.c)

    def summary(self):
        return {"n": self.n, "c": self.c, "kappa_star": self.kappa_star,
                "R_origin": self.R_origin, "avr": self.avr, "r_max": self.r_max,
                "slope_err": self.slope_err}


def _check_monotone(history):
    pts = sorted(history)
    for (k1, s1), (k2, s2) in zip(pts, pts[1:]):
        if k2 > k1 and not s2 < s1:
            raise MonotonicityError(
                f"slope not decreasing in kappa: w'({k1:.6g}) = {s1:.9g}, w'({k2:.6g}) = {s2:.9g}")


def _bisect(n, c, lo, hi, r_max, tol, rtol):
    """Bisection in ``log kappa`` with every slope measured at the same ``r_max``."""
    s_lo, s_hi = _slope_at(n, lo, r_max, rtol), _slope_at(n, hi, r_max, rtol)
    bracket = [(lo, s_lo), (hi, s_hi)]
    if not s_lo > c > s_hi:
        raise BracketError(f"cone angle {c} left the bracket at r_max = {r_max:g}",
                           slope_range=(s_hi, s_lo))
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        s_mid = _slope_at(n, mid, r_max, rtol)
        bracket.append((mid, s_mid))
        _check_monotone(bracket)
        if abs(s_mid - c) <= 0.5 * tol:
            return mid, bracket
        if s_mid > c:
            lo = mid
        else:
            hi = mid
    raise NumericalError(f"bisection did not reach |w' - c| <= {tol / 2:g}")


def solve_expander(n, c, tol=SHOOTING_TOL, rtol=ODE_REL_TOL, grid_size=1024):
    """Find ``kappa`` whose expander has asymptotic cone angle ``c``.

    ``w'(r_max)`` is matched to ``c`` within ``tol``, with ``r_max`` chosen
    so that ``|w''(r_max)| r_max <= tol``.

    Raises
    ------
    BracketError
        If ``c`` is not reached for ``kappa`` up to ``KAPPA_CEILING``.
    MonotonicityError
        If the recorded slopes fail to decrease strictly with ``kappa``.
    """
    if int(n) != n or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    c = float(c)
    if not 0.0 < c < 1.0:
        raise ParameterError(f"cone angle must lie in (0, 1), got {c!r}")
    if not tol >= 1e-8:
        raise ParameterError("shooting tolerance must be at least 1e-8")

    history = []
    lo, hi = KAPPA_LOW, KAPPA_HIGH
    r_max = _flat_radius(n, hi, tol, rtol)
    s_lo = _slope_at(n, lo, r_max, rtol)
    s_hi = _slope_at(n, hi, r_max, rtol)
    history += [(lo, s_lo), (hi, s_hi)]
    if s_lo <= c:
        raise BracketError(f"cone angle {c} above the slope {s_lo:.9g} reached at kappa = {lo:g}",
                           slope_range=(s_hi, s_lo))
    while s_hi > c:
        if hi >= KAPPA_CEILING:
            raise BracketError(f"cone angle {c} not reached: slope {s_hi:.6g} at kappa = {hi:g}",
                               slope_range=(s_hi, s_lo))
        lo, s_lo = hi, s_hi
        hi *= 4.0
        r_max = _flat_radius(n, hi, tol, rtol)
        s_hi = _slope_at(n, hi, r_max, rtol)
        history.append((hi, s_hi))
    _check_monotone(history)

    for _ in range(4):
        mid, bracket = _bisect(n, c, lo, hi, r_max, tol, rtol)
        history += bracket
        profile = integrate_soliton(n, SolitonKind.EXPANDING, mid, r_max, rtol=rtol,
                                    grid_size=grid_size)
        if tail_curvature(profile.solution, r_max) * r_max <= tol:
            break
        # kappa* converges more slowly than the bracket end; push r_max out.
        r_max = _flat_radius(n, mid, tol, rtol, start=r_max)
    else:
        raise NumericalError("tail criterion not met at the solved kappa")
    achieved = float(profile.evaluate(r_max)["dw"][0])
    return ShootingResult(n=n, c=c, kappa_star=mid, achieved_slope=achieved, r_max=r_max,
                          profile=profile, history=history)


# ---------------------------------------------------------------------------
# asymptotic volume ratio

def closed_form_avr(n, c):
    """``|S^{n-1}| c^{n-1} / n``: the volume ratio of the cone of angle ``c``."""
    surface, _ = sphere_constant(n)
    return surface * c ** (n - 1) / n


def ball_volume(profile, radius, tol=1e-10):
    """``vol B(o, radius) = |S^{n-1}| int_0^radius w^{n-1}``."""
    if radius > profile.r_max:
        raise ProfileTooShortError(f"radius {radius:g} beyond r_max = {profile.r_max:g}")
    n = profile.n
    surface, _ = sphere_constant(n)

    def density(r):
        return profile.evaluate(r)["w"] ** (n - 1)

    scale = radius ** n
    return surface * scale * adaptive_simpson(lambda r: density(r) / scale, 0.0, radius,
                                              tol=tol, initial_panels=64)


def direct_avr(profile):
    """``vol B(o,r) / r^n`` at ``r_max/2`` and ``r_max`` and their extrapolation.

    The ratio behaves like ``AVR + b/r + O(1/r^2)``, so the two samples are
    combined to cancel the ``1/r`` term.
    """
    r = profile.r_max
    far = ball_volume(profile, r) / r ** profile.n
    near = ball_volume(profile, r / 2) / (r / 2) ** profile.n
    return {"near": near, "far": far, "limit": 2.0 * far - near}


def asymptotic_volume_ratio(source, rel_tol=1e-3):
    """AVR from a cone ``(n, c)`` or from a :class:`ShootingResult`.

    For a shooting result the closed form is cross-checked against the
    direct limit of the ball-volume ratio.

    Raises
    ------
    ProfileTooShortError
        If the two estimates differ by more than ``rel_tol``.
    """
    if isinstance(source, ShootingResult):
        closed = closed_form_avr(source.n, source.c)
        direct = direct_avr(source.profile)
        if abs(direct["limit"] - closed) > rel_tol * closed:
            raise ProfileTooShortError(
                f"volume ratio has not settled: closed form {closed:.9g}, direct {direct['limit']:.9g}",
                estimates=(closed, direct["limit"]))
        return closed
    n, c = source
    if not 0.0 < c <= 1.0:
        raise ParameterError("cone angle must lie in (0, 1]")
    return closed_form_avr(int(n), float(c))


def avr_inequality_check(result):
    """Compare normalized ball and sub-level-set volumes with the AVR.

    Checks ``vol B(o, sqrt R(o)) / R(o)^{n/2} <= 4^n AVR`` and
    ``vol{f <= 9/4 R(o)} / (13/4 R(o))^{n/2} <= 2^n AVR``; slack is reported
    as ``bound / value``.
    """
    p = result.profile
    Ro = result.R_origin
    if not Ro > 0.0:
        raise ParameterError("needs R(o) > 0")
    n = p.n
    avr = result.avr
    radius = math.sqrt(Ro)
    ball = ball_volume(p, radius) / Ro ** (n / 2)

    level = 2.25 * Ro
    f = p.f
    if f[-1] < level:
        raise ProfileTooShortError("sub-level set reaches beyond r_max")
    # f is increasing, so the sub-level set is a ball; find its radius.
    j = int(np.searchsorted(f, level))
    lo_r, hi_r = p.r[j - 1], p.r[j]
    for _ in range(100):
        mid = 0.5 * (lo_r + hi_r)
        if p.evaluate(mid)["f"][0] < level:
            lo_r = mid
        else:
            hi_r = mid
    r_level = 0.5 * (lo_r + hi_r)
    sub = ball_volume(p, r_level) / (level + Ro) ** (n / 2)
    return {
        "avr": avr,
        "ball_ratio": ball,
        "ball_bound": 4.0 ** n * avr,
        "ball_slack": 4.0 ** n * avr / ball,
        "ball_ok": ball <= 4.0 ** n * avr,
        "level_radius": r_level,
        "level_ratio": sub,
        "level_bound": 2.0 ** n * avr,
        "level_slack": 2.0 ** n * avr / sub,
        "level_ok": sub <= 2.0 ** n * avr,
    }


# ---------------------------------------------------------------------------
# blow-up towards the steady soliton

def bryant_profile(n, s_max=5.0, rtol=ODE_REL_TOL):
    """Steady soliton normalized to ``R(o) = 1``."""
    return integrate_soliton(n, SolitonKind.STEADY, 1.0 / (n * (n - 1)), s_max, rtol=rtol)


def normalized_distance(result, bryant, s_max=5.0, samples=2001):
    """``sup_{s <= s_max} |sqrt(R) w(s / sqrt(R)) - w_B(s)|`` with ``R = R(o)``."""
    s = np.linspace(0.0, s_max, samples)
    root = math.sqrt(result.R_origin)
    w_hat = root * result.profile.evaluate(s / root)["w"]
    w_b = bryant.evaluate(s)["w"]
    return float(np.max(np.abs(w_hat - w_b)))


def blowup_extract(n, c_list, tol=SHOOTING_TOL, rtol=ODE_REL_TOL, s_max=5.0):
    """Solve expanders along decreasing cone angles and compare with the steady soliton.

    Each row: ``c, kappa_star, R_origin, avr, eps_coeff = 1/(2 R(o))`` and
    ``dist_to_bryant``.
    """
    c_list = [float(c) for c in c_list]
    if len(c_list) < 3:
        raise ParameterError("need at least three cone angles to see a trend")
    if any(b >= a for a, b in zip(c_list, c_list[1:])):
        raise ParameterError("cone angles must be strictly decreasing")
    bryant = bryant_profile(n, s_max, rtol)
    rows = []
    for c in c_list:
        res = solve_expander(n, c, tol, rtol)
        rows.append({"c": c, "kappa_star": res.kappa_star, "R_origin": res.R_origin,
                     "avr": res.avr, "eps_coeff": 1.0 / (2.0 * res.R_origin),
                     "dist_to_bryant": normalized_distance(res, bryant, s_max)})
    return rows

"""Volume scale at points on the axis of a rotationally symmetric profile.

Points are written ``(r, theta)``, with ``theta`` the angle to the ray from
``o`` through the centre.  Exact distances would need a geodesic solver, so
every ball is squeezed between two sets:

* inner: points reached by a path that runs radially to some radius ``s``,
  along the circle of radius ``w(s)``, then radially again, so the length is
  ``|r_x - s| + w(s) theta + |s - r|`` and bounds the distance from above;
* outer: since ``w`` is increasing, any path whose lowest radius is ``s`` has
  length at least ``sqrt((r_x + r - 2s)^2 + (w(s) theta)^2)``.

When the profile has non-negative curvature (``w'' <= 0``, ``w' <= 1``) the
hinge comparison ``d^2 <= r_x^2 + r^2 - 2 r_x r cos(theta)`` enlarges the
inner set.

Both sets are star-shaped in ``theta``, so each reduces to a threshold angle
``theta*(r)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .geometry import sphere_constant

HALF = 0.5


def _angular_mass(n, samples=4097):
    """``Theta(a) = int_0^a sin^{n-2}`` as an interpolating callable on [0, pi]."""
    a = np.linspace(0.0, math.pi, samples)
    dens = np.sin(a) ** (n - 2)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(a))])
    return lambda x: np.interp(x, a, cum)


def nonnegatively_curved(profile, radius, tol=1e-6):
    """Whether ``w'' <= 0`` and ``w' <= 1`` on the profile grid up to ``radius``.

    ``tol`` absorbs integration noise in the far field, where ``w''`` is
    evaluated from the equations.
    """
    r = profile.r[profile.r <= radius]
    vals = profile.evaluate(r)
    return bool(np.all(vals["ddw"] <= tol) and np.all(vals["dw"] <= 1.0 + tol))


def ball_volume_bounds(profile, r_point, rho, n_r=1500, n_s=800, hinge=None):
    """``(lower, upper)`` for ``vol B(x, rho)`` with ``x`` at radius ``r_point`` on the axis.

    ``hinge`` switches the comparison bound on or off; by default it is used
    when :func:`nonnegatively_curved` holds.
    """
    n = profile.n
    r_lo, r_hi = max(0.0, r_point - rho), r_point + rho
    if r_hi > profile.r_max:
        raise ParameterError(f"ball reaches r = {r_hi:g} beyond r_max = {profile.r_max:g}")
    r = np.linspace(r_lo, r_hi, n_r)
    s = np.linspace(0.0, r_hi, n_s)
    w_r = profile.evaluate(r)["w"]
    w_s = profile.evaluate(s)["w"]
    with np.errstate(divide="ignore", invalid="ignore"):
        # inner set
        slack = rho - np.abs(r_point - s)[None, :] - np.abs(s[None, :] - r[:, None])
        inner = np.where(slack >= 0.0, np.where(w_s > 0.0, slack / w_s, np.inf), -np.inf)
        # outer set; only lowest radii below both endpoints count
        radial = r_point + r[:, None] - 2.0 * s[None, :]
        room = rho ** 2 - radial ** 2
        low = s[None, :] <= np.minimum(r, r_point)[:, None]
        outer = np.where((room >= 0.0) & low,
                         np.where(w_s > 0.0, np.sqrt(np.maximum(room, 0.0)) / w_s, np.inf), -np.inf)
    theta_in = np.clip(inner.max(axis=1), 0.0, math.pi)
    if hinge is None:
        hinge = nonnegatively_curved(profile, r_hi)
    if hinge and r_point > 0.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_max = (r_point ** 2 + r ** 2 - rho ** 2) / (2.0 * r_point * r)
        angle = np.where(r > 0.0, np.arccos(np.clip(cos_max, -1.0, 1.0)), math.pi)
        theta_in = np.maximum(theta_in, np.where(cos_max > 1.0, 0.0, angle))
    theta_out = np.clip(outer.max(axis=1), 0.0, math.pi)
    mass = _angular_mass(n)
    sphere, _ = sphere_constant(n - 1) if n > 2 else (2.0, None)
    weight = w_r ** (n - 1)
    lower = sphere * np.trapezoid(weight * mass(theta_in), r)
    upper = sphere * np.trapezoid(weight * mass(theta_out), r)
    return float(lower), float(upper)


@dataclass(frozen=True)
class VolumeScale:
    """Bracket ``[lower, upper]`` for the volume scale at an axis point.

    ``capped`` is set when the volume ratio never fell below one half on the
    radii the profile can hold; the values are then ``r_max - r_point``.
    """

    r_point: float
    lower: float
    upper: float
    capped: bool
    flag: str = ""

    @property
    def value(self):
        return 0.5 * (self.lower + self.upper)

    def __float__(self):
        return self.value


def _crossing(ratio, lo, hi, iters):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ratio(mid) >= HALF:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def volume_scale(profile, r_point, rel_tol=1e-4, n_r=1500, n_s=800):
    """``sup{rho : vol B(x, rho) >= omega_n rho^n / 2}`` for ``x`` on the axis.

    Bisects separately with the inner and outer volumes; since the ratio of
    either to ``omega_n rho^n`` decreases in ``rho`` this brackets the value.
    """
    r_point = float(r_point)
    if not 0.0 <= r_point < profile.r_max:
        raise ParameterError(f"centre {r_point!r} outside [0, r_max = {profile.r_max:g})")
    _, omega = sphere_constant(profile.n)
    reach = profile.r_max - r_point
    tiny = 1e-6 * reach
    hinge = nonnegatively_curved(profile, profile.r_max)

    def ratios(rho):
        lo, hi = ball_volume_bounds(profile, r_point, rho, n_r, n_s, hinge)
        norm = omega * rho ** profile.n
        return lo / norm, hi / norm

    lo_far, hi_far = ratios(reach)
    if lo_far >= HALF:
        return VolumeScale(r_point, reach, reach, True, "never below half-Euclidean")
    iters = max(1, int(math.ceil(math.log2(reach / (rel_tol * reach)))))
    lower = _crossing(lambda rho: ratios(rho)[0], tiny, reach, iters)
    if hi_far >= HALF:
        return VolumeScale(r_point, lower, reach, True, "upper end capped at r_max")
    upper = _crossing(lambda rho: ratios(rho)[1], tiny, reach, iters)
    return VolumeScale(r_point, lower, upper, False)

"""Smooth approximations of the Heaviside function on [0, pi/2].

The family is built from two smooth steps::

    beta(y)  = 2 * int_0^y sigma(u) du,   sigma = SmoothStep(0, 1/4)
    gamma(z) = SmoothStep(0, 1/2)(z)

    chi_delta(x) = (1 - gamma(1 + x/delta - pi/(2 delta))) * exp(-beta(x**delta/delta - 1))

For small ``delta`` the left transition of ``chi_delta`` lives at absurdly
small ``x`` (it starts at ``delta**(1/delta)``, e.g. 1e-26 for delta = 0.05),
so every integral over that transition is carried out in the variable
``y = x**delta/delta - 1`` and points are tracked through ``log x``.  Nothing
here ever needs ``x`` itself to be representable.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .quadrature import DEFAULT_TOL, adaptive_simpson

HALF_PI = 0.5 * math.pi

# Beyond this y the factor exp(-beta(y)) is below 1e-50.
Y_NEGLIGIBLE = 60.0


# ---------------------------------------------------------------------------
# smooth steps

def _unit_step(u):
    """Value and first two derivatives of the unit smooth step on [0, 1]."""
    u = np.asarray(u, dtype=float)
    s = np.where(u >= 1.0, 1.0, 0.0)
    ds = np.zeros_like(s)
    dds = np.zeros_like(s)
    inside = (u > 0.0) & (u < 1.0)
    if np.any(inside):
        v = u[inside]
        w = 1.0 - v
        g = 1.0 / v - 1.0 / w
        e = np.exp(-np.abs(g))
        val = np.where(g > 0.0, e / (1.0 + e), 1.0 / (1.0 + e))
        logistic_slope = e / (1.0 + e) ** 2
        h = 1.0 / v ** 2 + 1.0 / w ** 2
        dh = -2.0 / v ** 3 + 2.0 / w ** 3
        d1 = logistic_slope * h
        s[inside] = val
        ds[inside] = d1
        dds[inside] = (1.0 - 2.0 * val) * d1 * h + logistic_slope * dh
    return s, ds, dds


@dataclass(frozen=True)
class SmoothStep:
    """C-infinity monotone step: 0 below ``ramp_start``, 1 above ``ramp_end``.

    Built from the partition ``psi(u) / (psi(u) + psi(1-u))`` with
    ``psi(u) = exp(-1/u)``.
    """

    ramp_start: float
    ramp_end: float

    def __post_init__(self):
        if not self.ramp_start < self.ramp_end:
            raise ParameterError("SmoothStep needs ramp_start < ramp_end")

    @property
    def width(self):
        return self.ramp_end - self.ramp_start

    def __call__(self, x):
        return self.derivatives(x)[0]

    def derivatives(self, x):
        """Return ``(S, S', S'')`` at ``x``."""
        s, ds, dds = _unit_step((np.asarray(x, dtype=float) - self.ramp_start) / self.width)
        return s, ds / self.width, dds / self.width ** 2


SIGMA = SmoothStep(0.0, 0.25)
GAMMA = SmoothStep(0.0, 0.5)

# Cumulative integral of SIGMA on [0, 1/8].  Values further right follow from
# the symmetry sigma(u) + sigma(1/4 - u) = 1.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_B_KNOTS = np.linspace(0.0, 0.125, 257)


def _gauss_legendre(lo, hi):
    half = 0.5 * (hi - lo)
    centre = 0.5 * (hi + lo)
    x = centre[:, None] + half[:, None] * _GL_NODES[None, :]
    return half * (SIGMA(x) @ _GL_WEIGHTS)


_B_TABLE = np.concatenate([[0.0], np.cumsum(_gauss_legendre(_B_KNOTS[:-1], _B_KNOTS[1:]))])


def _sigma_integral_left(y):
    k = np.clip(np.searchsorted(_B_KNOTS, y, side="right") - 1, 0, _B_KNOTS.size - 2)
    return _B_TABLE[k] + _gauss_legendre(_B_KNOTS[k], y)


def sigma_integral(y):
    """``int_0^y sigma(u) du`` for real ``y``."""
    y = np.asarray(y, dtype=float)
    out = np.where(y >= 0.25, y - 0.125, 0.0)
    left = (y > 0.0) & (y <= 0.125)
    if np.any(left):
        out[left] = _sigma_integral_left(y[left])
    right = (y > 0.125) & (y < 0.25)
    if np.any(right):
        yr = y[right]
        out[right] = yr - 0.125 + _sigma_integral_left(0.25 - yr)
    return out


def beta(y):
    """The convex ramp: zero for ``y <= 0`` and ``2y - 1/4`` for ``y >= 1/4``."""
    return 2.0 * sigma_integral(y)


def beta_derivatives(y):
    """Return ``(beta, beta', beta'')``."""
    s, ds, _ = SIGMA.derivatives(y)
    return beta(y), 2.0 * s, 2.0 * ds


def gamma(z):
    return GAMMA(z)


# ---------------------------------------------------------------------------
# the cutoff family

def check_delta(delta):
    delta = float(delta)
    if not (0.0 < delta <= 1.0) or not math.isfinite(delta):
        raise ParameterError(f"delta must lie in (0, 1], got {delta!r}")
    return delta


@dataclass(frozen=True)
class CutoffFamily:
    """The cutoff ``chi_delta`` for one value of ``delta``."""

    delta: float

    def __post_init__(self):
        check_delta(self.delta)

    @property
    def eta(self):
        """Plateau radius ``min(delta**(1/delta), delta/2)``."""
        return min(self.left_edge, 0.5 * self.delta)

    @property
    def log_left_edge(self):
        return math.log(self.delta) / self.delta

    @property
    def left_edge(self):
        """``delta**(1/delta)``: below it ``beta_delta`` vanishes (may underflow to 0)."""
        return math.exp(self.log_left_edge)

    @property
    def right_ramp(self):
        """Interval on which ``gamma_delta`` climbs from 0 to 1."""
        return HALF_PI - self.delta, HALF_PI - 0.5 * self.delta

    # -- coordinates -------------------------------------------------------

    def y_of_log_x(self, log_x):
        return np.exp(self.delta * np.asarray(log_x, dtype=float)) / self.delta - 1.0

    def log_x_of_y(self, y):
        return np.log(self.delta * (np.asarray(y, dtype=float) + 1.0)) / self.delta

    def y_of_x(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.log(np.where(x > 0.0, x, 1.0))
        return np.where(x > 0.0, self.y_of_log_x(lx), -1.0)

    def _gamma_arg(self, x):
        return 1.0 + (x - HALF_PI) / self.delta

    # -- values ------------------------------------------------------------

    def value_and_derivative(self, x):
        """``(chi_delta(x), chi_delta'(x))`` for array ``x``."""
        x = np.asarray(x, dtype=float)
        y = self.y_of_x(x)
        b, db, _ = beta_derivatives(y)
        g, dg, _ = GAMMA.derivatives(self._gamma_arg(x))
        decay = np.exp(-b)
        value = (1.0 - g) * decay
        # beta_delta'(x) = beta'(y) * x**(delta-1); combined in log space
        # because x**(delta-1) overflows exactly where exp(-beta) underflows.
        with np.errstate(divide="ignore"):
            log_term = (np.log(np.where(db > 0.0, db, 1.0)) - b
                        + (self.delta - 1.0) * np.log(np.where(x > 0.0, x, 1.0)))
        beta_part = np.where((db > 0.0) & (x > 0.0), np.exp(np.minimum(log_term, 700.0)), 0.0)
        derivative = -dg / self.delta * decay - (1.0 - g) * beta_part
        return value, derivative

    def __call__(self, x):
        return self.value_and_derivative(x)[0]

    def value_of_y(self, y):
        """``chi_delta`` as a function of ``y`` (valid for ``y > -1``)."""
        y = np.asarray(y, dtype=float)
        x = np.exp(self.log_x_of_y(y))
        return (1.0 - GAMMA(self._gamma_arg(x))) * np.exp(-beta(y))

    def neg_slope_in_y(self, y):
        """``-d chi_delta / dy``, the density of the transition in ``y``."""
        y = np.asarray(y, dtype=float)
        lx = self.log_x_of_y(y)
        x = np.exp(lx)
        b, db, _ = beta_derivatives(y)
        g, dg, _ = GAMMA.derivatives(self._gamma_arg(x))
        dxdy = np.exp((1.0 / self.delta - 1.0) * np.log(self.delta * (y + 1.0)))
        return (dg / self.delta * dxdy + (1.0 - g) * db) * np.exp(-b)

    def support_start_y(self):
        """Smallest ``y`` at which ``chi_delta`` starts to fall."""
        lo_x = min(self.left_edge, self.right_ramp[0]) if self.left_edge > 0.0 else 0.0
        if lo_x <= 0.0:
            return 0.0
        return float(min(0.0, self.y_of_x(lo_x)))


def eval_cutoff(delta, x):
    """Return ``(chi_delta(x), chi_delta'(x))`` as floats."""
    fam = CutoffFamily(check_delta(delta))
    v, d = fam.value_and_derivative(float(x))
    return float(v), float(d)


# ---------------------------------------------------------------------------
# weighted derivative ratio  int_0^r -chi'(x) sin(x) dx / sin(r)

def _sinc(z):
    return np.sinc(np.asarray(z) / math.pi)


# Beyond this offset exp(-s) underflows.
S_NEGLIGIBLE = 745.0


def _ratio_integrand(fam):
    # Integrand in s = log(r) - log(x), so the factor x/r is exactly exp(-s)
    # however narrow the transition is in y.  y(s) = (y_r + 1) exp(-delta s) - 1.
    def integrand(s, y_r, log_r):
        shrink = np.expm1(-fam.delta * s)
        y = y_r + (y_r + 1.0) * shrink
        dy_ds = fam.delta * (y_r + 1.0) * (1.0 + shrink)
        kernel = np.exp(-s) * _sinc(np.exp(log_r - s)) / _sinc(np.exp(log_r))
        return fam.neg_slope_in_y(y) * dy_ds * kernel
    return integrand


def _log_gap(fam, log_from, y_from, log_to, y_to):
    """``log(x_to / x_from)``, from whichever coordinate carries more digits.

    Differences of ``log x`` lose ``|log x| * 1e-16``; differences of ``y``
    lose about ``1e-16 / delta``.
    """
    log_from, log_to = np.asarray(log_from, dtype=float), np.asarray(log_to, dtype=float)
    y_from, y_to = np.asarray(y_from, dtype=float), np.asarray(y_to, dtype=float)
    via_log = log_to - log_from
    via_y = np.log1p((y_to - y_from) / (y_from + 1.0)) / fam.delta
    use_log = np.maximum(np.abs(log_from), np.abs(log_to)) * fam.delta < 1.0
    return np.where(use_log, via_log, via_y)


def _segments(fam, log_from, y_from, log_to, y_to, tol):
    """``int_{x_from}^{x_to} -chi' sin / sin(x_to)`` for arrays of segments."""
    gap = np.minimum(_log_gap(fam, log_from, y_from, log_to, y_to), S_NEGLIGIBLE)
    gap = np.maximum(gap, 0.0)
    pieces = adaptive_simpson(_ratio_integrand(fam), np.zeros_like(gap), gap,
                              tol=tol, args=(y_to, log_to))
    return np.atleast_1d(pieces), gap


def weighted_derivative_ratio(delta, r, tol=DEFAULT_TOL):
    """``int_0^r -chi_delta'(x) sin(x) dx / sin(r)`` by adaptive quadrature.

    Parameters
    ----------
    delta : float
        Cutoff parameter in (0, 1].
    r : float
        Upper limit in (0, pi/2).
    tol : float
        Absolute quadrature tolerance.

    Raises
    ------
    QuadratureError
        If the subdivision cap is reached; carries the achieved error.
    """
    fam = CutoffFamily(check_delta(delta))
    r = float(r)
    if not 0.0 < r < HALF_PI:
        raise ParameterError(f"r must lie in (0, pi/2), got {r!r}")
    log_r = math.log(r)
    y_lo = fam.support_start_y()
    y_r = float(fam.y_of_log_x(log_r))
    if y_r <= y_lo:
        return 0.0
    log_lo = float(fam.log_x_of_y(y_lo))
    pieces, _ = _segments(fam, log_lo, y_lo, log_r, y_r, tol)
    return float(pieces[0])


@dataclass(frozen=True)
class RatioProfile:
    """The weighted derivative ratio sampled on a verification grid.

    ``y`` holds the transition coordinate of each node; it is what keeps
    nodes distinguishable when ``r`` itself underflows.
    """

    delta: float
    log_r: np.ndarray
    y: np.ndarray
    ratio: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def r(self):
        return np.exp(self.log_r)

    @property
    def sup(self):
        return float(np.max(self.ratio))

    @property
    def argmax_log_r(self):
        return float(self.log_r[int(np.argmax(self.ratio))])

    def at(self, log_r):
        """Ratio at arbitrary ``log r`` by integrating from the nearest node below."""
        fam = CutoffFamily(self.delta)
        log_r = np.atleast_1d(np.asarray(log_r, dtype=float))
        out = np.zeros_like(log_r)
        y_lo = fam.support_start_y()
        y_r = np.maximum(fam.y_of_log_x(log_r), y_lo)
        k = np.searchsorted(self.log_r, log_r, side="right") - 1
        inside = k >= 0
        if np.any(inside):
            kk = k[inside]
            pieces, gap = _segments(fam, self.log_r[kk], self.y[kk], log_r[inside], y_r[inside],
                                    self.tol)
            carry = np.exp(-gap) * _sinc(np.exp(self.log_r[kk])) / _sinc(np.exp(log_r[inside]))
            out[inside] = self.ratio[kk] * carry + pieces
        # Below the first node the profile starts from zero at the support start.
        below = ~inside
        if np.any(below):
            pieces, _ = _segments(fam, fam.log_x_of_y(y_lo), y_lo, log_r[below], y_r[below],
                                  self.tol)
            out[below] = np.where(y_r[below] > y_lo, pieces, 0.0)
        return out


def verification_log_grid(fam, n_y=1200, n_x=800):
    """Sorted ``log r`` grid on (0, pi/2]: uniform in ``y`` and uniform in ``r``.

    The ``y`` part resolves the left transition whatever its scale, the ``r``
    part resolves the right ramp and the decay towards pi/2.
    """
    y_top = float(fam.y_of_log_x(math.log(HALF_PI)))
    y_lo = fam.support_start_y()
    ys = np.linspace(y_lo, min(y_top, y_lo + Y_NEGLIGIBLE), n_y + 1)[1:]
    from_y = fam.log_x_of_y(ys)
    xs = np.linspace(0.0, HALF_PI, n_x + 1)[1:]
    ramp = np.linspace(*fam.right_ramp, 33)
    from_x = np.log(np.concatenate([xs, ramp[(ramp > 0.0) & (ramp <= HALF_PI)]]))
    grid = np.unique(np.concatenate([from_y, from_x]))
    return grid[grid <= math.log(HALF_PI)]


def ratio_profile(delta, tol=DEFAULT_TOL, n_y=1200, n_x=800):
    """Weighted derivative ratio on :func:`verification_log_grid`.

    Uses ``J(r2) = J(r1) sin(r1)/sin(r2) + int_{r1}^{r2} -chi' sin / sin(r2)``,
    so each grid segment is integrated exactly once.
    """
    fam = CutoffFamily(check_delta(delta))
    log_r = verification_log_grid(fam, n_y, n_x)
    y_lo = fam.support_start_y()
    y = np.maximum(fam.y_of_log_x(log_r), y_lo)
    log_prev = np.concatenate([[float(fam.log_x_of_y(y_lo))], log_r[:-1]])
    y_prev = np.concatenate([[y_lo], y[:-1]])
    # Every segment integral is relative to its own sin(r); share tol equally.
    pieces, gap = _segments(fam, log_prev, y_prev, log_r, y, tol / log_r.size)
    carry = np.exp(-gap[1:]) * _sinc(np.exp(log_r[:-1])) / _sinc(np.exp(log_r[1:]))
    ratio = np.empty_like(log_r)
    acc = 0.0
    for k in range(log_r.size):
        if k:
            acc *= carry[k - 1]
        acc += pieces[k]
        ratio[k] = acc
    return RatioProfile(delta=fam.delta, log_r=log_r, y=y, ratio=ratio, tol=tol)


@lru_cache(maxsize=256)
def ratio_sup(delta, tol=DEFAULT_TOL, n_y=1200, n_x=800):
    """Supremum of the weighted derivative ratio over the verification grid."""
    return ratio_profile(delta, tol, n_y, n_x).sup

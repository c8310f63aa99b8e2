"""Rotationally symmetric gradient Ricci solitons.

The metric is ``dr^2 + w(r)^2 g_{S^{n-1}}`` and the soliton equation
``Ric + (eps/2) g = Hess f`` (``eps = 0`` steady, ``eps = 1`` expanding)
reduces to

    w'' = -w' f' + (n - 2)(1 - w'^2)/w + eps w / 2
    f'' = -(n - 1) w''/w + eps / 2

with scalar curvature ``R = -2(n-1) w''/w + (n-1)(n-2)(1 - w'^2)/w^2``.
The origin is a regular singular point, so integration starts at a small
``r0`` from a Taylor series in ``kappa``, the sectional curvature there.

State vector: ``(w, s, f, F, I, K)`` with ``s = 1 - w'`` (kept separately
because ``1 - w'^2`` is tiny near the origin), ``F = f'``, and two running
integrals used to check the trace and Bianchi identities in integrated form,

    I = int (R + eps n / 2) w^{n-1} dr      (equals w^{n-1} f' up to a constant)
    K = int Ric_rr f' dr                    (equals -(R - R(o)) / 2 up to a constant)
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import OutOfRegimeError, ParameterError, StepSizeError

R0 = 1e-3
ODE_REL_TOL = 1e-9
# Absolute tolerance, in units of each component's size at the seam.
ODE_ABS_TOL = 1e-14
# Expanders are stiff in the tail (deviations of w' decay like exp(-r^2/4)),
# steady solitons are not.
ODE_METHODS = {0.0: "DOP853", 1.0: "LSODA"}
# DOP853 takes long steps in the steady tail and its interpolant between
# them is far less accurate than the steps; a cap keeps evaluate() at rtol.
MAX_STEP = {0.0: 0.25, 1.0: np.inf}


class SolitonKind(enum.Enum):
    STEADY = 0
    EXPANDING = 1

    @property
    def epsilon(self):
        return float(self.value)

    @classmethod
    def parse(cls, kind):
        if isinstance(kind, cls):
            return kind
        if kind in (0, 1):
            return cls(int(kind))
        try:
            return cls[str(kind).upper()]
        except KeyError:
            raise ParameterError(f"unknown soliton kind {kind!r}") from None


def series_coefficients(n, eps, kappa):
    """Taylor coefficients at the origin.

    ``w = r + w3 r^3 + w5 r^5 + w7 r^7`` and ``f = f2 r^2 + f4 r^4 + f6 r^6``.
    """
    k = kappa
    cf = (n - 1) * k + eps / 2
    w5 = k * (6 * eps + 13 * k * n - 10 * k) / (120 * (n + 2))
    w7 = -k * (90 * eps ** 2 + 426 * eps * k * n - 276 * eps * k + 493 * k ** 2 * n ** 2
               - 678 * k ** 2 * n + 200 * k ** 2) / (5040 * (n + 2) * (n + 4))
    f4 = -k * (n - 1) * (eps + 2 * k * n - 2 * k) / (12 * (n + 2))
    f6 = (k * (n - 1) * (eps + 2 * k * n - 2 * k) * (9 * eps + 22 * k * n - 20 * k)
          / (360 * (n + 2) * (n + 4)))
    return {"w3": -k / 6, "w5": w5, "w7": w7, "f2": cf / 2, "f4": f4, "f6": f6}


def series_state(n, eps, kappa, r):
    """``(w, s, f, F)`` from the Taylor series at radius ``r``."""
    c = series_coefficients(n, eps, kappa)
    r2 = r * r
    w = r * (1 + r2 * (c["w3"] + r2 * (c["w5"] + r2 * c["w7"])))
    s = -r2 * (3 * c["w3"] + r2 * (5 * c["w5"] + r2 * 7 * c["w7"]))
    f = r2 * (c["f2"] + r2 * (c["f4"] + r2 * c["f6"]))
    F = r * (2 * c["f2"] + r2 * (4 * c["f4"] + r2 * 6 * c["f6"]))
    return w, s, f, F


def _derivatives(n, eps, w, s, F):
    """``(s', f'', R, Ric_rr)`` from the state; ``s' = -w''``."""
    dw = 1.0 - s
    one_minus_dw2 = s * (2.0 - s)
    ds = dw * F - (n - 2) * one_minus_dw2 / w - eps * w / 2
    ric_rr = (n - 1) * ds / w
    dF = ric_rr + eps / 2
    R = 2.0 * ric_rr + (n - 1) * (n - 2) * one_minus_dw2 / (w * w)
    return ds, dF, R, ric_rr


def _rhs(n, eps):
    def rhs(r, y):
        w, s, f, F = y[0], y[1], y[2], y[3]
        ds, dF, R, ric_rr = _derivatives(n, eps, w, s, F)
        return np.array([1.0 - s, ds, F, dF, (R + eps * n / 2) * w ** (n - 1), ric_rr * F])
    return rhs


def _check(n, kappa):
    if int(n) != n or n < 2:
        raise ParameterError(f"dimension n must be an integer >= 2, got {n!r}")
    kappa = float(kappa)
    if not kappa >= 0.0 or not math.isfinite(kappa):
        raise ParameterError(f"kappa must be a non-negative number, got {kappa!r}")
    return int(n), kappa


def _initial_state(n, eps, kappa, r0):
    w, s, f, F = series_state(n, eps, kappa, r0)
    return np.array([w, s, f, F, 0.0, 0.0])


def _abs_tol(n, r0):
    # Components start at very different sizes near the seam: w ~ r0,
    # s ~ r0^2, the flux integral ~ r0^n.
    return ODE_ABS_TOL * np.array([r0, r0 ** 2, r0 ** 2, r0, r0 ** n, r0 ** 2])


def _solve(n, eps, kappa, r_start, y0, r_end, rtol, events=None, r0=R0):
    # An explicit first step keeps the automatic guess from collapsing to
    # ~1e-19 when kappa is large.
    return solve_ivp(_rhs(n, eps), (r_start, r_end), y0, method=ODE_METHODS[eps], rtol=rtol,
                     atol=_abs_tol(n, r0), dense_output=True, events=events,
                     first_step=min(1e-3 * r0, 0.5 * (r_end - r_start)), max_step=MAX_STEP[eps])


def _collapse_event(r, y):
    return y[0]


_collapse_event.terminal = True
_collapse_event.direction = -1


def _raise_for(sol):
    if sol.status == -1:
        raise StepSizeError(f"integration stopped at r = {sol.t[-1]:.6g}: {sol.message}",
                            r=float(sol.t[-1]))
    if sol.status == 1 and sol.t_events[0].size:
        r_bad = float(sol.t_events[0][0])
        raise OutOfRegimeError(f"warping function reaches 0 at r = {r_bad:.6g}", r=r_bad)


def default_grid(r0, r_max, size):
    """Union of uniform and geometric grids: resolves both the core and the tail."""
    grid = np.union1d(np.linspace(r0, r_max, size), np.geomspace(r0, r_max, size))
    grid[0], grid[-1] = r0, r_max
    return grid


@dataclass
class RotSolitonProfile:
    """A solved profile together with its dense interpolant.

    Array attributes are sampled on ``r``; :meth:`evaluate` gives the same
    quantities anywhere in ``[0, r_max]`` (series below ``r0``).
    """

    n: int
    kind: SolitonKind
    kappa: float
    r0: float
    r_max: float
    rtol: float
    solution: object = field(repr=False)
    r: np.ndarray = field(repr=False)
    w: np.ndarray = field(init=False, repr=False)
    dw: np.ndarray = field(init=False, repr=False)
    f: np.ndarray = field(init=False, repr=False)
    df: np.ndarray = field(init=False, repr=False)
    R: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = self.evaluate(self.r)
        self.w, self.dw, self.f, self.df, self.R = v["w"], v["dw"], v["f"], v["df"], v["R"]

    @property
    def epsilon(self):
        return self.kind.epsilon

    @property
    def R_origin(self):
        return self.n * (self.n - 1) * self.kappa

    @property
    def gradf2(self):
        return self.df ** 2

    def state(self, r):
        """Raw state ``(w, s, f, F, I, K)`` as an array of shape (6, len(r))."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r < 0.0) or np.any(r > self.r_max * (1 + 1e-12)):
            raise ParameterError(f"r must lie in [0, {self.r_max}]")
        out = np.empty((6, r.size))
        inner = r < self.r0
        if np.any(~inner):
            out[:, ~inner] = self.solution(np.minimum(r[~inner], self.r_max))
        if np.any(inner):
            ri = r[inner]
            out[:4, inner] = series_state(self.n, self.epsilon, self.kappa, ri)
            out[4:, inner] = np.nan
        return out

    def evaluate(self, r):
        """Dict of ``w, dw, ddw, f, df, ddf, R, ric_rr`` at ``r``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        w, s, f, F = self.state(r)[:4]
        with np.errstate(invalid="ignore", divide="ignore"):
            ds, dF, R, ric_rr = _derivatives(self.n, self.epsilon, w, s, F)
        at_origin = r == 0.0
        if np.any(at_origin):
            k = self.kappa
            ds[at_origin], ric_rr[at_origin] = 0.0, (self.n - 1) * k
            dF[at_origin] = (self.n - 1) * k + self.epsilon / 2
            R[at_origin] = self.R_origin
        return {"w": w, "dw": 1.0 - s, "ddw": -ds, "f": f, "df": F, "ddf": dF, "R": R,
                "ric_rr": ric_rr, "s": s}

    def columns(self):
        """Columns for export: ``r, w, dw, f, df, R, gradf2``."""
        return {"r": self.r, "w": self.w, "dw": self.dw, "f": self.f, "df": self.df,
                "R": self.R, "gradf2": self.gradf2}


def integrate_soliton(n, kind, kappa, r_max, rtol=ODE_REL_TOL, r0=R0, grid_size=1024):
    """Integrate the soliton ODE from the series seam ``r0`` out to ``r_max``.

    Parameters
    ----------
    n : int
        Dimension, at least 2.
    kind : SolitonKind or {"steady", "expanding"}
    kappa : float
        Sectional curvature at the origin; ``kappa = 0`` gives flat space
        (with the Gaussian potential in the expanding case).
    r_max : float
        Outer radius.
    rtol : float
        Relative tolerance of the adaptive integrator.

    Raises
    ------
    OutOfRegimeError
        If ``w`` reaches zero before ``r_max``.
    StepSizeError
        If the integrator cannot make progress.
    """
    n, kappa = _check(n, kappa)
    kind = SolitonKind.parse(kind)
    if not r_max > r0:
        raise ParameterError(f"r_max must exceed r0 = {r0}")
    if not rtol > 0.0:
        raise ParameterError("rtol must be positive")
    y0 = _initial_state(n, kind.epsilon, kappa, r0)
    sol = _solve(n, kind.epsilon, kappa, r0, y0, r_max, rtol, events=[_collapse_event], r0=r0)
    _raise_for(sol)
    return RotSolitonProfile(n=n, kind=kind, kappa=kappa, r0=r0, r_max=float(r_max), rtol=rtol,
                             solution=sol.sol, r=default_grid(r0, float(r_max), grid_size))


# ---------------------------------------------------------------------------
# identities

@dataclass(frozen=True)
class IdentityReport:
    """Worst relative residuals of the soliton identities and where they occur.

    ``sandwich`` is ``None`` for steady profiles, where the bounds on ``f``
    are not asserted.
    """

    trace: float
    trace_at: float
    first_integral: float
    first_integral_at: float
    bianchi: float
    bianchi_at: float
    sandwich: float = None
    sandwich_at: float = None

    def worst(self):
        vals = [self.trace, self.first_integral, self.bianchi]
        if self.sandwich is not None:
            vals.append(self.sandwich)
        return max(vals)

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _relative(num, den):
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.abs(num) / den
    return np.where(den > 0.0, out, np.where(num == 0.0, 0.0, np.inf))


def _worst(r, residual):
    i = int(np.argmax(residual))
    return float(residual[i]), float(r[i])


def check_identities(profile, grid_size=4097):
    """Residuals of the trace, first-integral, Bianchi and sandwich identities.

    All residuals are relative: the absolute defect divided by the sum of
    the magnitudes of the terms involved, so expanders (where ``f`` grows
    like ``r^2/4``) and steady solitons are measured alike.

    * trace, integrated: ``w^{n-1} f' - w0^{n-1} f'_0 = int (R + eps n/2) w^{n-1}``
    * first integral: ``R + f'^2 - eps f = R(o)``
    * Bianchi, integrated: ``R - R(r0) = -2 int Ric_rr f'``
    * sandwich (expanding only): ``r^2/4 <= f <= (r + 2 sqrt(R(o)))^2/4``
    """
    p = profile
    n, eps = p.n, p.epsilon
    r = default_grid(p.r0, p.r_max, grid_size)
    v = p.evaluate(r)
    I, K = p.state(r)[4:]
    w, F, f, R = v["w"], v["df"], v["f"], v["R"]
    Ro = p.R_origin

    flux = w ** (n - 1) * F
    flux0 = flux[0]
    trace = _relative(flux - flux0 - I, np.abs(flux) + np.abs(flux0) + np.abs(I))
    first = _relative(R + F * F - eps * f - Ro, np.abs(R) + F * F + eps * np.abs(f) + Ro)
    bianchi = _relative(R - R[0] + 2.0 * K, np.abs(R) + np.abs(R[0]) + 2.0 * np.abs(K))

    fields = {}
    fields["trace"], fields["trace_at"] = _worst(r, trace)
    fields["first_integral"], fields["first_integral_at"] = _worst(r, first)
    fields["bianchi"], fields["bianchi_at"] = _worst(r, bianchi)
    if p.kind is SolitonKind.EXPANDING:
        low = np.maximum(0.0, r * r / 4 - f)
        high = np.maximum(0.0, f - (r + 2.0 * math.sqrt(Ro)) ** 2 / 4)
        fields["sandwich"], fields["sandwich_at"] = _worst(r, np.maximum(low, high) / (1.0 + f))
    return IdentityReport(**fields)

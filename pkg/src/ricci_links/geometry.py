"""Doubly warped products ``dr^2 + a(r)^2 g_{S^{p-1}} + b(r)^2 g_{S^{q-1}}`` on [0, L]."""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateMetricError, ParameterError
from .quadrature import adaptive_simpson

HALF_PI = 0.5 * math.pi
EIGENVALUE_NAMES = ("radial_first", "radial_second", "first_fiber", "second_fiber", "mixed")


def sphere_constant(n):
    """Return ``(|S^{n-1}|, omega_n)``: unit sphere area and unit ball volume in R^n."""
    n = int(n)
    if n < 1:
        raise ParameterError("n must be at least 1")
    surface = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return surface, ball


@dataclass(frozen=True)
class Profile:
    """A warping function on [0, L] given by ``evaluate(r) -> (f, f', f'')``.

    ``complement(r)``, when given, returns ``1 - f'(r)**2`` without the
    cancellation of forming it from ``f'``.  ``regular_radius`` is the size
    of the neighbourhoods of 0 and L on which the profile is known to be
    smooth at its natural scale; endpoint limits are sampled inside them.
    ``germ_at_0`` is a profile agreeing with this one on ``[0, regular_radius[0]]``,
    used when that neighbourhood is too small to represent.
    """

    L: float
    evaluate: Callable = field(repr=False)
    name: str = "profile"
    complement: Callable = field(default=None, repr=False)
    regular_radius: tuple = (math.inf, math.inf)
    germ_at_0: "Profile" = field(default=None, repr=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return tuple(np.broadcast_to(np.asarray(v, dtype=float), r.shape) for v in self.evaluate(r))

    def one_minus_slope_sq(self, r):
        if self.complement is not None:
            return np.asarray(self.complement(np.asarray(r, dtype=float)), dtype=float)
        d = self(r)[1]
        return (1.0 - d) * (1.0 + d)

    def sample(self, grid_size):
        r = np.linspace(0.0, self.L, int(grid_size))
        return (r,) + self(r)

    @classmethod
    def cos(cls, L=HALF_PI):
        return cls(L, lambda r: (np.cos(r), -np.sin(r), -np.cos(r)), "cos",
                   complement=lambda r: np.cos(r) ** 2)

    @classmethod
    def sin(cls, L=HALF_PI):
        return cls(L, lambda r: (np.sin(r), np.cos(r), -np.sin(r)), "sin",
                   complement=lambda r: np.sin(r) ** 2)

    @classmethod
    def from_warp(cls, warp):
        fam = warp.cutoff
        return cls(HALF_PI, warp.derivatives, f"phi_t={warp.t:g}",
                   complement=warp.one_minus_slope_sq,
                   regular_radius=(fam.eta, 0.5 * fam.delta), germ_at_0=cls.sin())


@dataclass(frozen=True)
class DoublyWarpedMetric:
    """``scale * (dr^2 + a^2 g_{S^{p-1}} + b^2 g_{S^{q-1}})`` on [0, L]."""

    p: int
    q: int
    L: float
    a: Profile
    b: Profile
    scale: float = 1.0

    def __post_init__(self):
        if int(self.p) < 2 or int(self.q) < 2:
            raise ParameterError("p and q must be at least 2")
        if not self.L > 0.0:
            raise ParameterError("L must be positive")
        if not self.scale > 0.0:
            raise ParameterError("scale must be positive")

    @property
    def dimension(self):
        return self.p + self.q - 1

    def rescaled(self, factor):
        return DoublyWarpedMetric(self.p, self.q, self.L, self.a, self.b, self.scale * factor)

    def boundary_residuals(self):
        """Deviations from the data that close the metric up into a smooth sphere."""
        ends = np.array([0.0, self.L])
        a, da, _ = self.a(ends)
        b, db, _ = self.b(ends)
        return {
            "a_0_positive": float(a[0]),
            "da_0": abs(float(da[0])),
            "b_0": abs(float(b[0])),
            "db_0": abs(float(db[0]) - 1.0),
            "a_L": abs(float(a[1])),
            "da_L": abs(float(da[1]) + 1.0),
            "b_L_positive": float(b[1]),
            "db_L": abs(float(db[1])),
        }

    def closes_smoothly(self, tol=1e-8):
        res = self.boundary_residuals()
        positives = ("a_0_positive", "b_L_positive")
        return (all(res[k] > tol for k in positives)
                and all(v <= tol for k, v in res.items() if k not in positives))


def _eigenvalue_curves(metric, r):
    a, da, dda = metric.a(r)
    b, db, ddb = metric.b(r)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        bad = r[(a <= 0.0) | (b <= 0.0)][0]
        raise DegenerateMetricError(f"warping function vanishes at interior r = {bad:.6g}")
    ca = metric.a.one_minus_slope_sq(r)
    cb = metric.b.one_minus_slope_sq(r)
    eig = np.stack([-dda / a, -ddb / b, ca / (a * a), cb / (b * b), -da * db / (a * b)], axis=-1)
    return eig / metric.scale


def curvature_eigenvalues(metric, r):
    """The five curvature-operator eigenvalues at an interior radius.

    In order: radial/first fibre, radial/second fibre, within the first
    fibre, within the second fibre, and mixed fibre planes.

    Raises
    ------
    ParameterError
        If ``r`` is not strictly inside (0, L).
    DegenerateMetricError
        If ``a(r)`` or ``b(r)`` is not positive.
    """
    r = float(r)
    if not 0.0 < r < metric.L:
        raise ParameterError(f"r must lie strictly inside (0, {metric.L}), got {r!r}")
    return tuple(float(v) for v in _eigenvalue_curves(metric, np.array([r]))[0])


def _endpoint_limit(metric, edge, h):
    # Eigenvalue curves are even about either end of a smoothly closing
    # metric, so Richardson extrapolation removes the O(h^2) term.  The step
    # is shrunk into the profiles' regular neighbourhoods.
    side = 0 if edge == 0.0 else 1
    a, b = metric.a, metric.b
    tiny = np.finfo(float).tiny / np.finfo(float).eps
    if side == 0:
        # A neighbourhood below the smallest normal number is replaced by
        # the germ the profile agrees with there.
        if a.regular_radius[0] < tiny and a.germ_at_0 is not None:
            a = a.germ_at_0
        if b.regular_radius[0] < tiny and b.germ_at_0 is not None:
            b = b.germ_at_0
    radius = min(a.regular_radius[side], b.regular_radius[side])
    h = max(min(h, 0.25 * radius), tiny)
    local = DoublyWarpedMetric(metric.p, metric.q, metric.L, a, b, metric.scale)
    sign = 1.0 if side == 0 else -1.0
    coarse = _eigenvalue_curves(local, np.array([edge + sign * h]))[0]
    fine = _eigenvalue_curves(local, np.array([edge + sign * h / 2]))[0]
    return (4.0 * fine - coarse) / 3.0


@dataclass(frozen=True)
class CurvatureSpectrum:
    r: np.ndarray
    eigenvalues: np.ndarray
    minimum: float
    argmin_r: float
    argmin_index: int

    def curve(self, k):
        return self.eigenvalues[:, k]


def _interior_grid(metric, grid_size):
    if int(grid_size) < 64:
        raise ParameterError("grid_size must be at least 64")
    return np.linspace(0.0, metric.L, int(grid_size) + 1)[1:-1]


def _minimum(r, eig):
    flat = int(np.argmin(eig))  # row-major: smallest r first, then smallest index
    i, k = divmod(flat, eig.shape[1])
    return float(eig[i, k]), float(r[i]), k


def curvature_spectrum(metric, grid_size=1024):
    """Eigenvalue curves on a uniform grid, endpoints filled by one-sided limits."""
    inner = _interior_grid(metric, grid_size)
    eig = _eigenvalue_curves(metric, inner)
    h = inner[0]
    left = _endpoint_limit(metric, 0.0, h)
    right = _endpoint_limit(metric, metric.L, h)
    r = np.concatenate([[0.0], inner, [metric.L]])
    full = np.vstack([left, eig, right])
    m, at, k = _minimum(inner, eig)
    return CurvatureSpectrum(r=r, eigenvalues=full, minimum=m, argmin_r=at, argmin_index=k)


def min_curvature(metric, grid_size=1024):
    """``(min, argmin_r, eigenvalue_index)`` over the interior grid."""
    inner = _interior_grid(metric, grid_size)
    return _minimum(inner, _eigenvalue_curves(metric, inner))


def volume(metric, tol=1e-12):
    """Riemannian volume ``scale^{dim/2} |S^{p-1}| |S^{q-1}| int a^{p-1} b^{q-1}``."""
    p, q = metric.p, metric.q

    def density(r):
        a = metric.a(r)[0]
        b = metric.b(r)[0]
        return a ** (p - 1) * b ** (q - 1)

    integral = adaptive_simpson(density, 0.0, metric.L, tol=tol, initial_panels=16)
    sp, _ = sphere_constant(p)
    sq, _ = sphere_constant(q)
    return metric.scale ** (metric.dimension / 2) * sp * sq * integral


# ---------------------------------------------------------------------------
# ideal boundary data

@dataclass(frozen=True)
class BoundaryData:
    """Samples of ``(a, b)`` on a grid of [0, L]."""

    L: float
    r: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def from_functions(cls, L, a, b, n=513):
        r = np.linspace(0.0, L, n)
        return cls(L, r, np.asarray(a(r), dtype=float), np.asarray(b(r), dtype=float))


@dataclass(frozen=True)
class BoundaryReport:
    checks: dict
    worst: dict

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failed(self):
        return [k for k, ok in self.checks.items() if not ok]


def _second_differences(r, f):
    h1 = np.diff(r)[:-1]
    h2 = np.diff(r)[1:]
    slopes = np.diff(f) / np.diff(r)
    return 2.0 * (slopes[1:] - slopes[:-1]) / (h1 + h2)


def validate_ideal_boundary(data, tol=1e-8):
    """Check the necessary conditions on ``(L, a, b)`` for a boundary of the soliton.

    Conditions: ``L`` in [0, pi/2]; ``a, b`` in [0, 1]; both 1-Lipschitz and
    concave; ``a`` non-increasing, ``b`` non-decreasing; ``a(L) = 0`` and
    ``b(0) = 0``.  Concavity compares divided second differences against
    ``tol / h^2`` with ``h`` the mean spacing.

    Raises
    ------
    ParameterError
        If the sample grid is not strictly increasing from 0 to ``L``.
    """
    r = np.asarray(data.r, dtype=float)
    a = np.asarray(data.a, dtype=float)
    b = np.asarray(data.b, dtype=float)
    L = float(data.L)
    if r.ndim != 1 or r.size < 3 or a.shape != r.shape or b.shape != r.shape:
        raise ParameterError("need at least three samples of r, a, b of equal length")
    if np.any(np.diff(r) <= 0.0):
        raise ParameterError("sample grid must be strictly increasing")
    if abs(r[0]) > tol or abs(r[-1] - L) > tol * max(1.0, L):
        raise ParameterError("sample grid must run from 0 to L")

    h = np.diff(r)
    lip_a = np.abs(np.diff(a)) / h
    lip_b = np.abs(np.diff(b)) / h
    conc_tol = tol / float(np.mean(h)) ** 2
    d2a = _second_differences(r, a)
    d2b = _second_differences(r, b)
    worst = {
        "L": L,
        "range_min": float(min(a.min(), b.min())),
        "range_max": float(max(a.max(), b.max())),
        "lipschitz_a": float(lip_a.max()),
        "lipschitz_b": float(lip_b.max()),
        "concavity_a": float(d2a.max()),
        "concavity_b": float(d2b.max()),
        "a_increase": float(np.diff(a).max()),
        "b_decrease": float(-np.diff(b).min()),
        "a_end": float(a[-1]),
        "b_start": float(b[0]),
    }
    checks = {
        "length": -tol <= L <= HALF_PI + tol,
        "range": worst["range_min"] >= -tol and worst["range_max"] <= 1.0 + tol,
        "lipschitz_a": worst["lipschitz_a"] <= 1.0 + tol,
        "lipschitz_b": worst["lipschitz_b"] <= 1.0 + tol,
        "concave_a": worst["concavity_a"] <= conc_tol,
        "concave_b": worst["concavity_b"] <= conc_tol,
        "a_non_increasing": worst["a_increase"] <= tol,
        "b_non_decreasing": worst["b_decrease"] <= tol,
        "a_vanishes_at_L": abs(worst["a_end"]) <= tol,
        "b_vanishes_at_0": abs(worst["b_start"]) <= tol,
    }
    return BoundaryReport(checks=checks, worst=worst)

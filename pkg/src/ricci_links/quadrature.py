"""Batched adaptive Simpson quadrature.

All integrals in the package are of smooth, bounded integrands on short
intervals, but there are many of them (one per grid segment).  Rather than
recursing interval by interval in Python, :func:`adaptive_simpson` keeps every
unconverged sub-interval of every requested integral in flat arrays and
refines them level by level, so that each refinement step costs a single
vectorised call of the integrand.
"""

import numpy as np

from .errors import QuadratureError

DEFAULT_TOL = 1e-10
MAX_INTERVALS = 2 ** 20
# Differences below this fraction of the panel sum are round-off.
ROUNDOFF = 1e-14


def _evaluate(f, x, args, owner):
    return np.asarray(f(x, *(arg[owner] for arg in args)), dtype=float)


def adaptive_simpson(f, a, b, tol=DEFAULT_TOL, args=(), max_intervals=MAX_INTERVALS,
                     initial_panels=4, return_error=False):
    """Integrate ``f`` over each interval ``[a_i, b_i]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand ``f(x, *args)``; ``x`` is a 1-d array and each
        entry of ``args`` is sliced to match it element-wise.
    a, b : float or array_like
        Integration limits, broadcast against each other.
    tol : float or array_like
        Absolute error target per integral.
    args : tuple of array_like
        Per-integral parameters, broadcast to the shape of ``a``.
    max_intervals : int
        Hard cap on the number of Simpson panels examined for any one integral.
    initial_panels : int
        Each integral starts out split into this many equal panels so that
        features narrower than the whole interval are sampled at least once.

    Returns
    -------
    value : float or ndarray
        Integral estimates; a float when ``a`` and ``b`` are scalars.
    error : float or ndarray
        Accumulated error estimates (only if ``return_error``).
    """
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0
    a, b, tol = np.broadcast_arrays(np.atleast_1d(np.asarray(a, dtype=float)),
                                    np.atleast_1d(np.asarray(b, dtype=float)),
                                    np.atleast_1d(np.asarray(tol, dtype=float)))
    a, b, tol = a.ravel(), b.ravel(), tol.ravel()
    m = a.size
    args = tuple(np.broadcast_to(np.asarray(arg, dtype=float), a.shape).ravel() for arg in args)

    value = np.zeros(m)
    error = np.zeros(m)

    k = int(initial_panels)
    frac = np.arange(k + 1) / k
    edges = a[:, None] + (b - a)[:, None] * frac[None, :]
    lo = edges[:, :-1].ravel()
    hi = edges[:, 1:].ravel()
    owner = np.repeat(np.arange(m), k)
    eps = np.repeat(tol / k, k)

    mid = 0.5 * (lo + hi)
    pts = _evaluate(f, np.concatenate([lo, mid, hi]), args, np.concatenate([owner] * 3))
    n = lo.size
    flo, fmid, fhi = pts[:n], pts[n:2 * n], pts[2 * n:]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    used = np.full(m, k)
    while lo.size:
        ql = 0.5 * (lo + mid)
        qr = 0.5 * (mid + hi)
        pts = _evaluate(f, np.concatenate([ql, qr]), args, np.concatenate([owner, owner]))
        n = lo.size
        fql, fqr = pts[:n], pts[n:]
        half = 0.5 * (hi - lo)
        left = half / 6.0 * (flo + 4.0 * fql + fmid)
        right = half / 6.0 * (fmid + 4.0 * fqr + fhi)
        delta = left + right - whole

        # Panels that cannot be split any further are accepted as they are.
        tiny = half <= 4.0 * np.finfo(float).eps * np.maximum(np.abs(mid), 1e-300)
        floor = ROUNDOFF * (np.abs(left) + np.abs(right))
        done = (np.abs(delta) <= np.maximum(15.0 * eps, floor)) | tiny | ~np.isfinite(delta)
        if np.any(done):
            np.add.at(value, owner[done], left[done] + right[done] + delta[done] / 15.0)
            np.add.at(error, owner[done], np.abs(delta[done]) / 15.0)

        keep = ~done
        used += 2 * np.bincount(owner[keep], minlength=m)
        if used.max() > max_intervals:
            pending = np.zeros(m)
            np.add.at(pending, owner[keep], np.abs(delta[keep]) / 15.0)
            worst = float(np.max(error + pending))
            raise QuadratureError(
                f"adaptive Simpson exceeded {max_intervals} panels on one integral; "
                f"achieved error estimate {worst:.3e}",
                achieved=worst)

        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fmid, fhi = flo[keep], fmid[keep], fhi[keep]
        fql, fqr = fql[keep], fqr[keep]
        left, right = left[keep], right[keep]
        owner, eps = owner[keep], eps[keep]
        ql, qr = ql[keep], qr[keep]

        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        flo, fhi = np.concatenate([flo, fmid]), np.concatenate([fmid, fhi])
        fmid = np.concatenate([fql, fqr])
        mid = np.concatenate([ql, qr])
        whole = np.concatenate([left, right])
        owner = np.concatenate([owner, owner])
        eps = np.concatenate([eps, eps]) * 0.5

    if scalar:
        value, error = float(value[0]), float(error[0])
    if return_error:
        return value, error
    return value

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldens import PHI_02_05, SELECTED_DELTA
from ricci_links.cutoff import HALF_PI, CutoffFamily
from ricci_links.errors import ParameterError, SelectionError
from ricci_links.warp import (WarpProfile, check_conditions, eval_warp, ratio_bound, select_delta,
                              select_delta_sweep, verify_warp_properties, warp_profile)

SWEEP = sorted(SELECTED_DELTA, reverse=True)


@pytest.mark.parametrize("t", SWEEP)
def test_selected_delta_goldens(t):
    assert select_delta(t) == SELECTED_DELTA[t]


def test_selection_is_largest_admissible():
    # one step up the halving grid must break a condition
    for t in (0.75, 0.5, 0.25, 0.1):
        d = select_delta(t)
        c = check_conditions(t, 2 * d)
        assert not (c["cutoff_ok"] and c["ratio_ok"])


def test_sweep_is_monotone():
    sweep = select_delta_sweep(SWEEP)
    deltas = [sweep[t] for t in SWEEP]
    assert all(b <= a for a, b in zip(deltas, deltas[1:]))


@pytest.mark.parametrize("t", [0.75, 0.25, 0.05])
def test_selection_stable_under_doubled_resolution(t):
    assert select_delta(t, n_y=2400, n_x=1600) == select_delta(t)


def test_ratio_bound_values():
    assert ratio_bound(1.0) == 1.0
    assert ratio_bound(0.75) == 0.75
    assert ratio_bound(0.5) == 0.5
    assert ratio_bound(0.25) == pytest.approx(1 / 12, rel=1e-15)


def test_selection_error_carries_condition():
    # a cap below every candidate leaves nothing to try
    with pytest.raises(SelectionError) as info:
        select_delta(0.5, cap=0.0)
    assert info.value.condition is None


@pytest.mark.parametrize("t", [0.0, -0.2, 1.01, float("nan")])
def test_rejects_bad_t(t):
    with pytest.raises(ParameterError):
        select_delta(t)


def test_rejects_radius_outside_interval():
    with pytest.raises(ParameterError):
        eval_warp(0.5, 1.6)
    with pytest.raises(ParameterError):
        eval_warp(0.5, -1e-3)


# -- values -------------------------------------------------------------------

@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, HALF_PI])
def test_round_case_is_sine(r):
    phi, dphi, ddphi = eval_warp(1.0, r)
    assert (phi, dphi, ddphi) == (math.sin(r), math.cos(r), -math.sin(r))


@pytest.mark.parametrize("t", SWEEP)
def test_origin_germ(t):
    assert eval_warp(t, 0.0) == (0.0, 1.0, 0.0)


def _trapezoid_phi(t, r, n=2 ** 21):
    # phi_t(r) = int_0^r (t + (1-t) chi) cos in u = log x below the plateau edge,
    # one Richardson step on grids of n and n/2 intervals
    fam = CutoffFamily(select_delta(t))
    lo = min(fam.eta, r) * 1e-3
    u = np.linspace(math.log(lo), math.log(r), n + 1)
    x = np.exp(u)
    g = (t + (1 - t) * fam(x)) * np.cos(x) * x
    fine = np.trapezoid(g, u)
    coarse = np.trapezoid(g[::2], u[::2])
    return lo + (4 * fine - coarse) / 3


def test_phi_golden_and_trapezoid_oracle():
    phi = eval_warp(0.2, 0.5)[0]
    assert phi == pytest.approx(PHI_02_05, rel=1e-12)
    assert phi == pytest.approx(_trapezoid_phi(0.2, 0.5), rel=1e-9)
    assert phi <= 3 * 0.2 * math.sin(0.5)


@pytest.mark.parametrize("t, r", [(0.75, 0.9), (0.5, 0.2), (0.25, 1.2)])
def test_phi_against_trapezoid(t, r):
    assert eval_warp(t, r)[0] == pytest.approx(_trapezoid_phi(t, r), rel=1e-9)


@pytest.mark.parametrize("t", SWEEP)
def test_warp_properties_hold(t):
    report = verify_warp_properties(t)
    assert report.passes()
    assert report.delta == SELECTED_DELTA[t]


@settings(max_examples=60, deadline=None)
@given(t=st.sampled_from(SWEEP), r=st.floats(0.0, HALF_PI))
def test_sandwiched_between_scaled_sines(t, r):
    phi = eval_warp(t, r)[0]
    s = math.sin(r)
    assert t * s * (1 - 1e-13) <= phi <= s * (1 + 1e-13)


def test_complement_matches_direct_form():
    w = warp_profile(0.5)
    r = np.linspace(0.0, HALF_PI, 200)
    d = w.derivatives(r)[1]
    np.testing.assert_allclose(w.one_minus_slope_sq(r), 1 - d * d, atol=1e-14)
    np.testing.assert_allclose(w.tan_slope(r)[1:-1], (np.tan(r) * d)[1:-1], rtol=1e-12)


@pytest.mark.parametrize("t", [0.75, 0.5])
def test_derivatives_second_order_finite_differences(t):
    w = warp_profile(t)
    r = np.linspace(0.05, 1.5, 41)
    _, d, dd = w.derivatives(r)
    errs = []
    for h in (2e-3, 1e-3):
        plus, minus = w.derivatives(r + h), w.derivatives(r - h)
        errs.append((np.max(np.abs((plus[0] - minus[0]) / (2 * h) - d)),
                     np.max(np.abs((plus[1] - minus[1]) / (2 * h) - dd))))
    for k in range(2):
        assert math.log2(errs[0][k] / errs[1][k]) >= 1.9


def test_continuity_on_constant_delta_interval():
    # t = 0.6, 0.65, 0.7 share delta = 1/2, so phi_t is affine in t there
    assert {select_delta(t) for t in (0.6, 0.65, 0.7)} == {0.5}
    r = np.linspace(0.0, HALF_PI, 513)
    base = warp_profile(0.6).derivatives(r)[0]
    gaps = [np.max(np.abs(warp_profile(0.6 + dt).derivatives(r)[0] - base)) for dt in (0.1, 0.05)]
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=1e-9)


def test_explicit_delta_bypasses_selection():
    w = WarpProfile(0.5, delta=0.125)
    assert w.delta == 0.125
    assert w.derivatives(np.array([0.0]))[1][0] == 1.0

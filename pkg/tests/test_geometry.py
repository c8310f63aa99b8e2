import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldens import VOLUME_23_HALF
from ricci_links.errors import DegenerateMetricError, ParameterError
from ricci_links.geometry import (HALF_PI, BoundaryData, DoublyWarpedMetric, Profile,
                                  curvature_eigenvalues, curvature_spectrum, min_curvature,
                                  sphere_constant, validate_ideal_boundary, volume)
from ricci_links.warp import warp_profile


def round_sphere(p=2, q=2, scale=1.0):
    return DoublyWarpedMetric(p, q, HALF_PI, Profile.cos(), Profile.sin(), scale)


@pytest.mark.parametrize("p, q", [(2, 2), (2, 3), (3, 3), (4, 2)])
def test_round_sphere_has_unit_curvature(p, q):
    spec = curvature_spectrum(round_sphere(p, q))
    np.testing.assert_allclose(spec.eigenvalues, 1.0, atol=1e-12)
    assert spec.minimum == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("scale, expected_min", [(4.0, 0.25), (0.5, 2.0)])
def test_curvature_scales_inversely(scale, expected_min):
    assert min_curvature(round_sphere(scale=scale))[0] == pytest.approx(expected_min, rel=1e-12)


def test_cos_factor_gives_unit_first_eigenvalues():
    m = DoublyWarpedMetric(2, 3, HALF_PI, Profile.cos(), Profile.from_warp(warp_profile(0.5)))
    for r in (0.1, 0.7, 1.4):
        eig = curvature_eigenvalues(m, r)
        assert eig[0] == pytest.approx(1.0, abs=1e-14)
        assert eig[2] == pytest.approx(1.0, abs=1e-14)


def test_endpoint_limits_are_even_extrapolations():
    m = DoublyWarpedMetric(2, 3, HALF_PI, Profile.cos(), Profile.from_warp(warp_profile(0.75)))
    spec = curvature_spectrum(m, 1024)
    # at r = 0 the warp agrees with sin, so every eigenvalue is 1
    np.testing.assert_allclose(spec.eigenvalues[0], 1.0, atol=1e-10)
    # at pi/2 the limit continues the interior curves
    np.testing.assert_allclose(spec.eigenvalues[-1], spec.eigenvalues[-2], rtol=1e-4)


def test_eigenvalues_require_interior_radius():
    with pytest.raises(ParameterError):
        curvature_eigenvalues(round_sphere(), 0.0)
    with pytest.raises(ParameterError):
        curvature_eigenvalues(round_sphere(), HALF_PI)


def test_degenerate_interior_rejected():
    vanishing = Profile(HALF_PI, lambda r: (np.sin(3 * r) / 3, np.cos(3 * r), -3 * np.sin(3 * r)))
    m = DoublyWarpedMetric(2, 2, HALF_PI, Profile.cos(), vanishing)
    with pytest.raises(DegenerateMetricError):
        min_curvature(m)


def test_grid_must_be_resolved():
    with pytest.raises(ParameterError):
        min_curvature(round_sphere(), 32)


@pytest.mark.parametrize("kwargs", [dict(p=1, q=2), dict(p=2, q=1)])
def test_dimensions_validated(kwargs):
    with pytest.raises(ParameterError):
        DoublyWarpedMetric(L=HALF_PI, a=Profile.cos(), b=Profile.sin(), **kwargs)


def test_scale_must_be_positive():
    with pytest.raises(ParameterError):
        round_sphere(scale=0.0)


# -- volume -------------------------------------------------------------------

@pytest.mark.parametrize("n, area, ball", [
    (2, 2 * math.pi, math.pi),
    (3, 4 * math.pi, 4 * math.pi / 3),
    (4, 2 * math.pi ** 2, math.pi ** 2 / 2),
])
def test_sphere_constants(n, area, ball):
    assert sphere_constant(n) == pytest.approx((area, ball), rel=1e-15)


@pytest.mark.parametrize("p, q, area", [(2, 2, 2 * math.pi ** 2), (2, 3, 8 * math.pi ** 2 / 3),
                                        (3, 3, math.pi ** 3)])
def test_round_volume(p, q, area):
    assert volume(round_sphere(p, q)) == pytest.approx(area, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.05, 20.0), p=st.integers(2, 4), q=st.integers(2, 4))
def test_volume_scaling_law(s, p, q):
    m = round_sphere(p, q)
    assert volume(m.rescaled(s)) == pytest.approx(s ** ((p + q - 1) / 2) * volume(m), rel=1e-12)


def test_volume_golden_and_trapezoid_oracle():
    m = DoublyWarpedMetric(2, 3, HALF_PI, Profile.cos(), Profile.from_warp(warp_profile(0.5)))
    vol = volume(m)
    assert vol == pytest.approx(VOLUME_23_HALF, rel=1e-12)
    r = np.linspace(0.0, HALF_PI, 100001)
    density = np.cos(r) * warp_profile(0.5).derivatives(r)[0] ** 2
    assert vol == pytest.approx(2 * math.pi * 4 * math.pi * np.trapezoid(density, r), rel=1e-8)


# -- ideal boundary validator -----------------------------------------------------

def hemisphere():
    return BoundaryData.from_functions(HALF_PI, np.cos, np.sin)


BAD_BOUNDARIES = {
    "length": BoundaryData.from_functions(2.0, lambda r: np.cos(math.pi * r / 4),
                                          lambda r: np.sin(math.pi * r / 4)),
    "concave_b": BoundaryData.from_functions(HALF_PI, np.cos, lambda r: 0.3 * r + 0.2 * r * r),
    "lipschitz_a": BoundaryData.from_functions(0.5, lambda r: 1 - (r / 0.5) ** 2, np.sin),
    "b_vanishes_at_0": BoundaryData.from_functions(HALF_PI, np.cos,
                                                   lambda r: 0.1 + 0.5 * np.sin(r)),
}


def test_hemisphere_accepted():
    report = validate_ideal_boundary(hemisphere())
    assert report.passed and report.failed == []


@pytest.mark.parametrize("condition", sorted(BAD_BOUNDARIES))
def test_each_fixture_fails_exactly_its_condition(condition):
    report = validate_ideal_boundary(BAD_BOUNDARIES[condition])
    assert report.failed == [condition]


def test_boundary_grid_validated():
    r = np.array([0.0, 0.5, 0.4, HALF_PI])
    with pytest.raises(ParameterError):
        validate_ideal_boundary(BoundaryData(HALF_PI, r, np.cos(r), np.sin(r)))
    r = np.array([0.0, 1.0])
    with pytest.raises(ParameterError):
        validate_ideal_boundary(BoundaryData(1.0, r, np.cos(r), np.sin(r)))


@settings(max_examples=40, deadline=None)
@given(k=st.floats(1.0, 3.0))
def test_shrunken_hemispheres_accepted(k):
    # a = cos(k r) / k, b = sin(k r) / k on [0, pi/(2k)] satisfies every condition
    L = HALF_PI / k
    data = BoundaryData.from_functions(L, lambda r: np.cos(k * r) / k,
                                       lambda r: np.sin(k * r) / k)
    assert validate_ideal_boundary(data).passed

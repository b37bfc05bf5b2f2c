import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from monoground.fab import (STANDARD_SPHERE_REFERENCE, PlatingReference, SkinDepthQuery,
                            coating_adequacy, faraday_thickness, plating_current, skin_depth)

REF = STANDARD_SPHERE_REFERENCE


def sphere_area(r):
    return 4 * np.pi * r ** 2


def test_copper_skin_depth_at_1p3_ghz():
    assert_allclose(skin_depth(SkinDepthQuery(1.3e9)), 1.8329e-3, rtol=1e-3)


@given(st.floats(1e6, 1e11), st.floats(1.5, 100.0))
def test_skin_depth_scales_as_inverse_root_frequency(f, k):
    a = skin_depth(SkinDepthQuery(f))
    b = skin_depth(SkinDepthQuery(f * k))
    assert_allclose(a / b, np.sqrt(k), rtol=1e-12)


@pytest.mark.parametrize("kw", [{"frequency": 0.0}, {"frequency": 1e9, "conductivity": -1.0},
                                {"frequency": float("nan")}])
def test_skin_depth_rejects_nonpositive(kw):
    with pytest.raises(ValueError):
        SkinDepthQuery(**kw)


def test_coating_adequacy():
    q = SkinDepthQuery(1.3e9)
    v = coating_adequacy(0.13, q)
    assert v.adequate and v.ratio > 50
    assert not coating_adequacy(0.05, q).adequate
    with pytest.raises(ValueError):
        coating_adequacy(-0.1, q)


def test_plating_current_reproduces_chosen_runs():
    small = plating_current(sphere_area(28.75), REF, 2.0)
    large = plating_current(sphere_area(86.25), REF, 4.0)
    assert_allclose(small, 0.6, rtol=1e-12)
    assert_allclose(large, 2.7, rtol=1e-12)
    assert abs(small / 0.5 - 1) <= 0.3
    assert abs(large / 2.2 - 1) <= 0.3


@given(st.floats(1.0, 1e6), st.floats(0.1, 48.0), st.floats(1.01, 10.0))
def test_plating_current_linear_and_monotone(area, hours, k):
    i = plating_current(area, REF, hours)
    assert_allclose(plating_current(k * area, REF, hours), k * i, rtol=1e-12)
    assert_allclose(plating_current(area, REF, k * hours), i / k, rtol=1e-12)
    assert plating_current(k * area, REF, hours) > i
    assert plating_current(area, REF, k * hours) < i


def test_plating_reference_validation():
    with pytest.raises(ValueError, match="hours"):
        PlatingReference(100.0, 1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        plating_current(-1.0, REF, 1.0)
    with pytest.raises(KeyError):
        PlatingReference.from_dict({"area_mm2": 1.0})


def test_faraday_estimate_is_far_below_logged_thickness():
    t = faraday_thickness(1.2, 4.0, sphere_area(57.5))
    assert_allclose(t, 0.01529, rtol=2e-3)
    assert REF.thickness_mm / t > 8

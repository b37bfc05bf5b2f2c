import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from monoground.analytic import (WAVELENGTH_EXACT_MM, WAVELENGTH_TABLE_MM, FarFieldWarning,
                                 MediumParams, MonopoleParams, ObservationPoint,
                                 field_components, image_distances_exact,
                                 image_distances_farfield, induced_emf_dipole, pattern_from_kh,
                                 total_field_pattern)

DEG = math.pi / 180


def test_medium_from_frequency():
    m = MediumParams.from_frequency(1.3e9)
    assert_allclose(m.wavelength * 1e3, 230.609, atol=1e-3)
    assert_allclose(m.eta, 376.73, atol=0.01)
    assert_allclose(m.wavenumber * m.wavelength, 2 * math.pi)
    assert WAVELENGTH_TABLE_MM == 230.0
    assert_allclose(WAVELENGTH_EXACT_MM, 230.609, atol=1e-3)


def test_medium_rejects_inconsistent_or_nonpositive():
    with pytest.raises(ValueError):
        MediumParams(1e9, 1.0, 1.0, 377.0)
    with pytest.raises(ValueError):
        MediumParams.from_frequency(0.0)


def test_image_distances_exact_values():
    r1, r2 = image_distances_exact(ObservationPoint(10.0, 60 * DEG), 1.0)
    assert_allclose([r1, r2], [9.5394, 10.5357], atol=1e-4)
    r1, r2 = image_distances_exact(ObservationPoint(10.0, 0.0), 1.0)
    assert_allclose([r1, r2], [9.0, 11.0])
    r1, r2 = image_distances_exact(ObservationPoint(7.0, 90 * DEG), 1.0)
    assert_allclose([r1, r2], [math.sqrt(50)] * 2)


def test_image_distances_farfield_values():
    r1, r2 = image_distances_farfield(ObservationPoint(10.0, 60 * DEG), 1.0)
    assert_allclose([r1, r2], [9.5, 10.5])
    exact = image_distances_exact(ObservationPoint(10.0, 60 * DEG), 1.0)[0]
    assert_allclose(abs(exact - r1) / exact, 0.0041, atol=1e-4)
    assert_allclose(image_distances_farfield(ObservationPoint(5.0, 90 * DEG), 0.1), (5.0, 5.0))


def test_farfield_warns_close_to_source():
    with pytest.warns(FarFieldWarning):
        image_distances_farfield(ObservationPoint(5.0, 0.3), 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        image_distances_farfield(ObservationPoint(10.0, 0.3), 1.0)


def test_distance_domain_errors():
    with pytest.raises(ValueError):
        ObservationPoint(0.0, 0.1)
    with pytest.raises(ValueError):
        image_distances_exact(ObservationPoint(1.0, 0.1), 0.0)
    with pytest.raises(ValueError):
        image_distances_farfield(ObservationPoint(1.0, 0.1), -1.0)


def test_observation_theta_range():
    with pytest.raises(ValueError):
        ObservationPoint(1.0, 3.5)


def test_field_zero_below_ground():
    m = MediumParams.from_frequency(1.3e9)
    mono = MonopoleParams(h=m.wavelength / 4)
    s = field_components(m, mono, ObservationPoint(100.0, 120 * DEG))
    assert s.e_total == 0
    assert s.e_direct != 0


def test_field_linearity_in_current():
    m = MediumParams.from_frequency(1.3e9)
    obs = ObservationPoint(50.0, 40 * DEG)
    a = field_components(m, MonopoleParams(0.05, i0=1.0), obs)
    b = field_components(m, MonopoleParams(0.05, i0=2.0), obs)
    assert_allclose(abs(b.e_total), 2 * abs(a.e_total))


def test_exact_converges_to_farfield():
    m = MediumParams.from_frequency(1.3e9)
    h = m.wavelength / 4
    mono = MonopoleParams(h)
    errs = []
    for ratio in (10, 100, 1000):
        obs = ObservationPoint(ratio * h, 50 * DEG)
        ex = abs(field_components(m, mono, obs, "exact").e_total)
        ff = abs(field_components(m, mono, obs, "farfield").e_total)
        errs.append(abs(ex - ff) / ff)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_pattern_quarter_wave_peak_at_horizon():
    theta = np.radians(np.arange(0, 181, 1.0))
    p = pattern_from_kh(math.pi / 2, theta)
    assert np.degrees(theta[np.argmax(p.linear)]) == 90.0
    assert p.linear.max() == 1.0
    assert np.all(p.clamped_db()[theta > math.pi / 2] == -80.0)
    assert p.clamped_db()[0] == -80.0


def test_pattern_matches_closed_form():
    theta = np.radians([30.0, 45.0, 60.0])
    kh = 1.2
    f = np.abs(np.sin(theta) * 2 * np.cos(kh * np.cos(theta)))
    assert_allclose(pattern_from_kh(kh, theta).linear, f / f.max())


def test_total_field_pattern_uses_kh():
    m = MediumParams.from_frequency(1.3e9)
    theta = np.radians(np.arange(0, 91, 5.0))
    a = total_field_pattern(m, MonopoleParams(m.wavelength / 4), theta)
    b = pattern_from_kh(math.pi / 2, theta)
    assert_allclose(a.linear, b.linear, atol=1e-12)


def test_pattern_errors():
    with pytest.raises(ValueError):
        pattern_from_kh(1.0, [])
    with pytest.raises(ValueError):
        pattern_from_kh(1.0, [0.0])


def test_induced_emf_half_wave():
    z = induced_emf_dipole(0.5, 0.001)
    assert_allclose(z.real, 73.08, atol=0.01)
    assert_allclose(z.imag, 42.5, atol=0.05)


def test_induced_emf_shorter_dipole_is_capacitive():
    assert induced_emf_dipole(0.45).imag < 0 < induced_emf_dipole(0.5).imag
    with pytest.raises(ValueError):
        induced_emf_dipole(1.0)

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from branchline.errors import OutOfRangeError, ValidationError
from branchline.microstrip import (
    ETA0,
    Substrate,
    analyze_width,
    electrical_length,
    synthesize_width,
)

DUROID_THIN = Substrate(eps_r=2.2, tan_d=0.0009, h_mm=0.508)
DUROID_THICK = Substrate(eps_r=2.2, tan_d=0.0009, h_mm=1.575)


def hj_reference(u, er):
    """Independent re-typing of the published closed forms (test oracle)."""
    a = (
        1
        + (1 / 49) * math.log((u**4 + (u / 52) ** 2) / (u**4 + 0.432))
        + (1 / 18.7) * math.log(1 + (u / 18.1) ** 3)
    )
    b = 0.564 * ((er - 0.9) / (er + 3)) ** 0.053
    eps = (er + 1) / 2 + (er - 1) / 2 * (1 + 10 / u) ** (-a * b)
    f = 6 + (2 * math.pi - 6) * math.exp(-((30.666 / u) ** 0.7528))
    z01 = ETA0 / (2 * math.pi) * math.log(f / u + math.sqrt(1 + (2 / u) ** 2))
    return z01 / math.sqrt(eps), eps


class TestAnalyze:
    def test_air_dielectric_eps_is_one(self):
        sub = Substrate(eps_r=1.0, tan_d=0.0, h_mm=1.0)
        assert analyze_width(0.7, sub).eps_eff == 1.0
        assert analyze_width(3.0, sub).eps_eff == 1.0

    def test_golden_value_at_unit_ratio(self):
        # Hand evaluation of the closed forms at w/h = 1, eps_r = 2.2 gives
        # eps_eff = 1.77235 and z0 = 94.963 ohm; frozen here.
        lp = analyze_width(0.508, DUROID_THIN)
        assert_allclose(lp.z0, 94.963064, atol=1e-4)
        assert_allclose(lp.eps_eff, 1.772347, atol=1e-5)

    def test_matches_reference_formulas(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            u = rng.uniform(0.05, 30.0)
            er = rng.uniform(1.0, 12.0)
            sub = Substrate(eps_r=er, tan_d=0.0, h_mm=0.8)
            lp = analyze_width(u * 0.8, sub)
            z_ref, eps_ref = hj_reference(u, er)
            assert_allclose(lp.z0, z_ref, rtol=1e-12)
            assert_allclose(lp.eps_eff, eps_ref, rtol=1e-12)

    def test_wider_is_lower_impedance(self):
        assert analyze_width(1.0, DUROID_THIN).z0 > analyze_width(2.0, DUROID_THIN).z0

    def test_monotone_over_validity_window(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            er = rng.uniform(1.0, 10.2)
            h = rng.uniform(0.1, 3.0)
            sub = Substrate(eps_r=er, tan_d=0.0, h_mm=h)
            u = np.linspace(0.05, 30.0, 300)
            z = np.array([analyze_width(ui * h, sub).z0 for ui in u])
            eps = np.array([analyze_width(ui * h, sub).eps_eff for ui in u])
            assert np.all(np.diff(z) < 0.0)
            assert np.all(np.diff(eps) > 0.0)
            assert np.all(eps >= 1.0) and np.all(eps <= er)

    def test_nonpositive_width_rejected(self):
        with pytest.raises(ValidationError):
            analyze_width(0.0, DUROID_THIN)

    def test_substrate_validation(self):
        with pytest.raises(ValidationError):
            Substrate(eps_r=0.5, tan_d=0.0, h_mm=1.0)
        with pytest.raises(ValidationError):
            Substrate(eps_r=2.2, tan_d=0.0, h_mm=0.0)
        with pytest.raises(ValidationError):
            Substrate(eps_r=2.2, tan_d=-1e-3, h_mm=1.0)


class TestSynthesize:
    def test_fifty_ohm_port_width_thin(self):
        w = synthesize_width(50.0, DUROID_THIN)
        assert abs(w - 1.566) < 0.05  # inside the folded port-line range
        assert 1.2 <= w <= 1.8

    def test_fifty_ohm_port_width_thick(self):
        w = synthesize_width(50.0, DUROID_THICK)
        assert abs(w - 4.855) < 0.1  # inside the cascaded port-line range
        assert 4.5 <= w <= 5.5

    def test_round_trip(self):
        for z in (30.0, 50.0, 70.0, 100.0):
            w = synthesize_width(z, DUROID_THIN)
            assert abs(analyze_width(w, DUROID_THIN).z0 - z) < 0.01

    def test_out_of_range_names_interval(self):
        with pytest.raises(OutOfRangeError, match="reachable range"):
            synthesize_width(500.0, DUROID_THIN)
        with pytest.raises(OutOfRangeError):
            synthesize_width(1.0, DUROID_THIN)


class TestElectricalLength:
    def test_zero_length(self):
        assert electrical_length(0.0, 1.0, 1.0) == 0.0

    def test_vacuum_quarter_wave(self):
        theta = electrical_length(74.948, 1.0, 1.0)
        assert abs(theta - math.pi / 2) < 1e-5

    def test_linear_in_frequency(self):
        t1 = electrical_length(10.0, 2.0, 1.3)
        t2 = electrical_length(10.0, 2.0, 2.6)
        assert_allclose(t2, 2.0 * t1, rtol=1e-15)

    def test_invalid_args(self):
        with pytest.raises(ValidationError):
            electrical_length(-1.0, 1.0, 1.0)
        with pytest.raises(ValidationError):
            electrical_length(1.0, 1.0, 0.0)

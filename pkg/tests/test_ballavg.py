"""Iterated ball averages: multipliers, coefficients, approximation rates."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import j1

from fracheat import (PeriodicGrid, SampledFunction, ValidationError, approx_error,
                      ball_avg_apply, coeffs_c, coeffs_c_fractions, localization_constant,
                      m_ell, make_lacunary, make_smoothstep, multiplier_shape_report)


def test_single_ball_multiplier_1d_is_sinc():
    xi = np.linspace(0.01, 50.0, 800)
    assert np.max(np.abs(m_ell(xi, 1, 1) - np.sin(xi) / xi)) <= 1e-10


def test_single_ball_multiplier_2d_is_bessel():
    xi = np.linspace(0.01, 40.0, 400)
    assert np.max(np.abs(m_ell(xi, 1, 2) - 2.0 * j1(xi) / xi)) <= 1e-10


def test_multiplier_at_zero_is_one():
    for ell in (1, 2, 3):
        for n in (1, 2):
            assert m_ell(np.array([0.0]), ell, n)[0] == pytest.approx(1.0, abs=1e-12)


def test_coefficients_exact():
    assert coeffs_c_fractions(2) == [Fraction(4, 3), Fraction(-1, 3)]
    assert coeffs_c_fractions(3) == [Fraction(3, 2), Fraction(-3, 5), Fraction(1, 10)]
    for ell in range(1, 5):
        assert sum(coeffs_c_fractions(ell)) == Fraction(1)
        assert np.allclose(coeffs_c(ell),
                           [float(c) for c in coeffs_c_fractions(ell)], atol=0)


def test_flatness_order_two_ell():
    # moment cancellation forces 1 - m_ell ~ xi^{2 ell} at the origin
    for ell in (1, 2, 3, 4):
        rep = multiplier_shape_report(ell, 1)
        assert abs(rep["flatness_exponent"] - 2 * ell) <= 0.1


def test_comparison_constants_ell_one():
    rep = multiplier_shape_report(1, 1)
    assert 0.15 <= rep["comparison_lower"]
    assert rep["comparison_upper"] <= 1.25


def test_average_of_constant_is_identity():
    g = PeriodicGrid(1, 128)
    f = SampledFunction(g, np.full(128, 2.5))
    out = ball_avg_apply(f, 2, 0.1)
    assert np.max(np.abs(out.values - 2.5)) <= 1e-12


def test_approximation_rate_frozen():
    g = PeriodicGrid(1, 4096)
    f = make_lacunary(g, 0.5)
    ts = np.geomspace(2.0 ** -8, 2.0 ** -2, 10)
    errs = np.array([approx_error(f, 1, float(t)) for t in ts])
    sup = float(np.max(errs * ts ** -0.5))
    assert sup == pytest.approx(5.7637356926890435, rel=1e-9)
    slope = float(np.polyfit(np.log(ts), np.log(errs), 1)[0])
    assert slope >= 0.4  # smoothness 1/2 minus a grid allowance


def test_localization_constant_finite():
    g = PeriodicGrid(1, 1024)
    f = make_smoothstep(g)
    c = localization_constant(f, 1, 2.0 ** -5)
    assert math.isfinite(c) and c > 0


def test_ballavg_validation():
    g = PeriodicGrid(1, 128)
    f = SampledFunction(g, np.zeros(128))
    with pytest.raises(ValidationError):
        ball_avg_apply(f, 0, 0.1)
    with pytest.raises(ValidationError):
        coeffs_c(0)

"""Grids, spectra, and multiplier plumbing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat import (PeriodicGrid, SampledFunction, ValidationError, apply_multiplier,
                      from_spectrum, resample, shift_eval, to_spectrum)


def test_grid_validation():
    with pytest.raises(ValidationError):
        PeriodicGrid(3, 64)
    with pytest.raises(ValidationError):
        PeriodicGrid(1, 48)  # not a power of two
    with pytest.raises(ValidationError):
        PeriodicGrid(1, 4)   # too small
    g = PeriodicGrid(2, 16)
    assert g.shape == (16, 16) and g.npoints == 256
    assert g.spacing == 1.0 / 16


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_spectrum_roundtrip(seed):
    g = PeriodicGrid(1, 64)
    f = SampledFunction(g, np.random.default_rng(seed).standard_normal(64))
    back = from_spectrum(to_spectrum(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-13


def test_multiplier_real_output_guard():
    g = PeriodicGrid(1, 64)
    f = SampledFunction(g, np.random.default_rng(0).standard_normal(64))
    k = g.freqs()
    # an asymmetric multiplier produces a complex function; the guard trips
    m = np.where(k > 0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        apply_multiplier(to_spectrum(f), m, real_output=True)


def test_shift_eval_closed_form():
    g = PeriodicGrid(1, 128)
    x = g.axis_points()
    f = SampledFunction(g, np.cos(2 * math.pi * 3 * x))
    h = 0.1234
    out = shift_eval(f, h)
    assert np.max(np.abs(out.values - np.cos(2 * math.pi * 3 * (x + h)))) <= 1e-12


def test_resample_band_limited_exact():
    g = PeriodicGrid(1, 64)
    x = g.axis_points()
    f = SampledFunction(g, np.sin(2 * math.pi * 5 * x) + 0.3 * np.cos(2 * math.pi * 11 * x))
    r = resample(f, 4)
    assert r.grid.size == 256
    # the refined samples interpolate the same trigonometric polynomial
    assert np.max(np.abs(r.values[::4] - f.values)) <= 1e-12
    xr = r.grid.axis_points()
    exact = np.sin(2 * math.pi * 5 * xr) + 0.3 * np.cos(2 * math.pi * 11 * xr)
    assert np.max(np.abs(r.values - exact)) <= 1e-12


def test_function_arithmetic():
    g = PeriodicGrid(1, 32)
    rng = np.random.default_rng(1)
    a = SampledFunction(g, rng.standard_normal(32))
    b = SampledFunction(g, rng.standard_normal(32))
    assert np.array_equal((a + b).values, a.values + b.values)
    assert np.array_equal((a - b).values, a.values - b.values)
    assert np.array_equal((a * 2.0).values, 2.0 * a.values)
    assert np.array_equal((-a).values, -a.values)


def test_dim2_roundtrip():
    g = PeriodicGrid(2, 16)
    f = SampledFunction(g, np.random.default_rng(2).standard_normal((16, 16)))
    back = from_spectrum(to_spectrum(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-13

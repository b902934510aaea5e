"""Kernel quadrature against closed forms and tail power laws."""

import math

import numpy as np
import pytest

from fracheat import NumericalError, ValidationError, kernel_decay_probe, kernel_values


def test_poisson_closed_form():
    xs = np.array([0.0, 0.5, 1.0, 2.0, 3.5, 5.0, 7.5, 10.0])
    vals = kernel_values(1.0, 1, xs)
    exact = (1.0 / math.pi) / (1.0 + xs ** 2)
    assert np.max(np.abs(vals / exact - 1.0)) <= 1e-6


def test_gauss_closed_form():
    xs = np.array([0.0, 0.5, 1.0, 2.0, 3.5, 5.0, 7.5, 10.0])
    vals = kernel_values(2.0, 1, xs)
    exact = np.exp(-xs ** 2 / 4.0) / math.sqrt(4 * math.pi)
    assert np.max(np.abs(vals / exact - 1.0)) <= 1e-6


def test_kernel_value_at_origin_is_one_over_pi():
    v = kernel_values(1.0, 1, [0.0])[0]
    assert abs(v - 1.0 / math.pi) <= 1e-12


def test_error_estimates_returned():
    vals, errs = kernel_values(1.5, 1, np.array([0.5, 2.0, 8.0]), with_error=True)
    assert np.all(errs >= 0) and np.all(errs <= 1e-8)
    assert np.all(vals > 0)


def test_tail_power_law():
    # alpha = 1 has the exact -2 tail; one probe keeps the unit test fast,
    # the full (alpha, k) sweep runs in the acceptance battery
    slope = kernel_decay_probe(1.0, 1, 0)
    assert abs(slope + 2.0) <= 0.15


def test_gaussian_beats_every_power():
    slope = kernel_decay_probe(2.0, 1, 0, radius_range=(5.0, 11.0))
    assert slope <= -3.5


def test_monotone_tail_small_alpha():
    xs = np.linspace(1.0, 5.0, 9)
    vals = kernel_values(0.5, 1, xs)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) < 0)


def test_kernel_validation():
    with pytest.raises(ValidationError):
        kernel_values(0.0, 1, [1.0])
    with pytest.raises(ValidationError):
        kernel_values(1.0, 3, [1.0])
    with pytest.raises(ValidationError):
        kernel_values(1.0, 1, [-1.0])
    with pytest.raises(ValidationError):
        kernel_values(1.0, 1, [1.0], k=3)
    with pytest.raises((ValidationError, NumericalError)):
        kernel_decay_probe(1.0, 1, 0, radius_range=(5.0, 2.0))

"""Semigroup algebra and the space-time derivative field."""

import math

import numpy as np
import pytest

from fracheat import (FracHeatParams, PeriodicGrid, SampledFunction, TimeGrid,
                      ValidationError, derivative_bound_probe, frac_laplacian_apply,
                      heat_deriv_field, lambda_s_norm_diff, make_lacunary, make_mode,
                      semigroup_apply, space_time_deriv)


def _random_bandlimited(seed, size=256, kmax=32):
    g = PeriodicGrid(1, size)
    rng = np.random.default_rng(seed)
    half = np.zeros(size // 2 + 1, dtype=complex)
    half[1:kmax + 1] = rng.standard_normal(kmax) + 1j * rng.standard_normal(kmax)
    v = np.fft.irfft(half, n=size)
    return SampledFunction(g, v / np.max(np.abs(v)))


def test_semigroup_law():
    for seed in range(10):
        f = _random_bandlimited(seed)
        a = 0.5 + 0.15 * seed
        two = semigroup_apply(semigroup_apply(f, a, 0.07), a, 0.21)
        one = semigroup_apply(f, a, 0.28)
        assert (two - one).sup_norm() <= 1e-12


def test_commutation_and_generator():
    f = _random_bandlimited(3)
    for a in (0.7, 1.0, 2.0):
        lhs = frac_laplacian_apply(semigroup_apply(f, a, 0.1), a)
        rhs = semigroup_apply(frac_laplacian_apply(f, a), a, 0.1)
        assert (lhs - rhs).sup_norm() <= 1e-12
        gen = space_time_deriv(f, a, 1, 0, 0.1)
        assert (gen + lhs).sup_norm() <= 1e-12


def test_semigroup_validation():
    f = _random_bandlimited(0)
    with pytest.raises(ValidationError):
        semigroup_apply(f, 1.0, -0.1)
    with pytest.raises(ValidationError):
        semigroup_apply(f, 0.0, 0.1)
    with pytest.raises(ValidationError):
        space_time_deriv(f, 1.0, 1, 0, 0.0)


def test_heat_field_single_mode_closed_form():
    g = PeriodicGrid(1, 256)
    f = make_mode(g, 1)
    p = FracHeatParams(alpha=2.0, r=2, s=0.5)
    tg = TimeGrid(6, 8)
    W = heat_deriv_field(f, p, tg)
    ts = tg.samples()
    w = 2 * math.pi
    expect = (w ** 4 * np.exp(-(ts * w) ** 2))[:, None] * np.cos(w * g.axis_points())[None, :]
    assert np.max(np.abs(W.W - expect)) <= 1e-12


def test_heat_envelope_single_mode():
    # sup_t t^{2 - 1/2} |d_t e^{-(2 pi t)^2}| * 2 pi ... attains
    # sqrt(2 pi) (3/4)^{3/4} e^{-3/4} in the continuum; the grid value is frozen
    g = PeriodicGrid(1, 256)
    f = make_mode(g, 1)
    p = FracHeatParams(alpha=2.0, r=1, s=0.5)
    env = heat_deriv_field(f, p, TimeGrid(8, 16)).envelope()
    assert env == pytest.approx(0.9540818454395313, rel=1e-12)
    cont = math.sqrt(2 * math.pi) * 0.75 ** 0.75 * math.exp(-0.75)
    assert env <= cont and env >= 0.999 * cont


def test_time_grid_structure():
    tg = TimeGrid(4, 8)
    ts = tg.samples()
    assert len(ts) == tg.row_count == 32
    for j in range(4):
        block = ts[tg.octave_rows(j)]
        assert np.all(block > 2.0 ** -(j + 1)) and np.all(block <= 2.0 ** -j)
        assert np.all(np.diff(block) > 0)
    assert tg.weight == pytest.approx(math.log(2.0) / 8, rel=1e-15)
    with pytest.raises(ValidationError):
        tg.octave_rows(4)
    with pytest.raises(ValidationError):
        TimeGrid(0, 8)
    with pytest.raises(ValidationError):
        TimeGrid(4, 2)


def test_heat_field_dim2():
    g = PeriodicGrid(2, 32)
    X, Y = g.points()
    f = SampledFunction(g, np.cos(2 * math.pi * (X + 2 * Y)))
    p = FracHeatParams(alpha=2.0, r=1, s=0.5)
    tg = TimeGrid(3, 4)
    W = heat_deriv_field(f, p, tg)
    w = 2 * math.pi * math.sqrt(5.0)
    ts = tg.samples()
    expect = -(w ** 2 * np.exp(-(ts * w) ** 2))[:, None, None] * f.values[None]
    assert np.max(np.abs(W.W - expect)) <= 1e-10


def test_derivative_bound_probe():
    g = PeriodicGrid(1, 1024)
    f = make_lacunary(g, 0.5)
    p = FracHeatParams(alpha=2.0, r=2, s=0.5)
    rep = derivative_bound_probe(f, p, TimeGrid(6, 8),
                                 lambda_norm=lambda_s_norm_diff(f, 0.5))
    assert math.isfinite(rep["C"]) and rep["C"] > 0
    # every tested pair satisfies the scaling constraint and has a finite sup
    for (i, b), rec in rep["pairs"].items():
        assert b + 2.0 * i > 0.5
        assert math.isfinite(rec["sup"])
    with pytest.raises(ValidationError):
        derivative_bound_probe(f, p, TimeGrid(4, 8), pairs=[(0, 0)])

"""Difference operators, moduli, and the two seminorm routes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracheat import (FracHeatParams, PeriodicGrid, SampledFunction, TimeGrid,
                      lambda_s_norm_diff, lambda_s_seminorm_diff, lambda_s_seminorm_heat,
                      make_lacunary, make_mode, make_random_decay, make_smoothstep,
                      standard_family, sym_diff, to_spectrum)
from fracheat.smoothness import modulus


def test_sym_diff_closed_form():
    g = PeriodicGrid(1, 256)
    x = g.axis_points()
    f = make_mode(g, 1)
    for y in (0.05, 0.1, 0.37):
        d = sym_diff(f, y, 1)
        exact = -2.0 * np.sin(2 * math.pi * x) * math.sin(math.pi * y)
        assert np.max(np.abs(d.values - exact)) <= 1e-12


def test_sym_diff_integer_displacement_annihilates():
    # y = 1 wraps every mode around the torus; the result must be zero,
    # not a validation failure from noise-level residues
    g = PeriodicGrid(1, 512)
    f = make_lacunary(g, 0.5)
    for k in (1, 2, 6):
        d = sym_diff(f, 1.0, k)
        assert d.sup_norm() <= 1e-10


def test_modulus_closed_form_and_seminorm():
    g = PeriodicGrid(1, 256)
    f = make_mode(g, 1)
    ys = np.array([0.1, 0.2, 0.3])
    m = modulus(f, 1, ys)
    assert np.allclose(m.values, 2.0 * np.abs(np.sin(math.pi * ys)), atol=1e-12)
    # frozen grid value of sup_y y^{-1/2} 2 sin(pi y) on the default y grid
    assert lambda_s_seminorm_diff(f, 0.5, r1=1) == pytest.approx(
        3.017531473697391, rel=1e-12)
    cont = 2 * math.sin(math.pi * 0.3710096482035516) / math.sqrt(0.3710096482035516)
    assert lambda_s_seminorm_diff(f, 0.5, r1=1) <= cont


def test_norm_is_sup_plus_seminorm():
    g = PeriodicGrid(1, 256)
    f = make_mode(g, 1)
    n = lambda_s_norm_diff(f, 0.5, r1=1)
    assert n == pytest.approx(1.0 + 3.017531473697391, rel=1e-12)


@given(st.integers(-3, 3))
@settings(max_examples=7, deadline=None)
def test_seminorm_dyadic_homogeneity(k):
    g = PeriodicGrid(1, 256)
    f = make_random_decay(g, 0.5, seed=5)
    lam = 2.0 ** k
    assert lambda_s_seminorm_diff(f * lam, 0.5) == lam * lambda_s_seminorm_diff(f, 0.5)


@given(st.integers(0, 2 ** 16), st.integers(0, 2 ** 16))
@settings(max_examples=10, deadline=None)
def test_seminorm_subadditive(sa, sb):
    g = PeriodicGrid(1, 128)
    fa = make_random_decay(g, 0.5, seed=sa)
    fb = make_random_decay(g, 0.7, seed=sb)
    lhs = lambda_s_seminorm_diff(fa + fb, 0.5)
    rhs = lambda_s_seminorm_diff(fa, 0.5) + lambda_s_seminorm_diff(fb, 0.5)
    assert lhs <= rhs + 1e-9


def test_route_ratios_frozen():
    # semigroup-route over difference-route seminorm at alpha=2, r=2, s=1/2
    g = PeriodicGrid(1, 4096)
    p = FracHeatParams(alpha=2.0, r=2, s=0.5)
    tg = TimeGrid(8, 16)
    expect = {"lacunary": 0.15929219101062306, "mode4": 0.3843579744540734,
              "smoothstep": 0.15094121903760208, "random": 0.21049584898633944}
    for name, f in standard_family(g, 0.5):
        ratio = lambda_s_seminorm_heat(f, p, tg) / lambda_s_seminorm_diff(f, 0.5, r1=1)
        assert ratio == pytest.approx(expect[name], rel=1e-9), name


def test_generators_band_limited():
    g = PeriodicGrid(1, 512)
    for f in (make_lacunary(g, 0.5), make_smoothstep(g), make_random_decay(g, 0.5)):
        coeffs = to_spectrum(f).coeffs
        k = g.freqs()
        assert np.max(np.abs(coeffs[np.abs(k) > g.size // 4])) <= 1e-12


def test_standard_family_names():
    g = PeriodicGrid(1, 256)
    names = [n for n, _ in standard_family(g, 0.5)]
    assert names == ["lacunary", "mode4", "smoothstep", "random"]


def test_smoothstep_edges_validated():
    g = PeriodicGrid(1, 256)
    with pytest.raises(Exception):
        make_smoothstep(g, edges=(0.75, 0.25))

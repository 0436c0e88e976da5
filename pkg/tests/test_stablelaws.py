"""Stable-law cross-validation: analytic inversion path vs CMS sampler path."""

import math

import numpy as np
import pytest

from gblab.stablelaws import (
    c_alpha,
    cauchy_law,
    cauchy_scaled_cdf,
    gaussian_cdf,
    gaussian_law,
    ks_distance,
    sample_stable,
    stable_cdf,
    stable_law,
    stable_pdf_mass,
)


def test_c_alpha_values():
    assert c_alpha(1.0) == pytest.approx(6 / math.pi, abs=1e-12)
    assert c_alpha(0.5) == pytest.approx(72 / math.pi**3, rel=1e-12)
    assert c_alpha(0.999) == pytest.approx(6 / math.pi, abs=1e-2)
    assert c_alpha(1.001) == pytest.approx(6 / math.pi, abs=1e-2)
    for bad in (0.0, 2.0, -1.0, 2.5):
        with pytest.raises(ValueError):
            c_alpha(bad)


def test_gaussian_cdf_basics():
    assert gaussian_cdf(0.0) == pytest.approx(0.5, abs=1e-14)
    assert gaussian_cdf(1.96) == pytest.approx(0.9750, abs=1e-4)
    v = np.linspace(-6, 6, 41)
    assert np.allclose(gaussian_cdf(v) + gaussian_cdf(-v), 1.0, atol=1e-12)


def test_gaussian_cdf_vs_erfc_series_oracle():
    # independent oracle: Taylor series of Phi around 0
    def phi_series(v, terms=60):
        s, term = 0.0, v
        for k in range(terms):
            s += term
            term *= -v * v * (2 * k + 1) / (2 * (k + 1) * (2 * k + 3))
        return 0.5 + s / math.sqrt(2 * math.pi)

    for v in (0.1, 0.5, 1.0, 1.96, 2.5):
        assert gaussian_cdf(v) == pytest.approx(phi_series(v), abs=1e-10)


def test_cauchy_cdf():
    assert cauchy_scaled_cdf(0.0) == pytest.approx(0.5)
    assert cauchy_scaled_cdf(1.0) == pytest.approx(0.75)
    assert cauchy_scaled_cdf(-1e6) < 1e-6


def test_ks_distance_hand_cases():
    law = gaussian_law()
    assert ks_distance([0.0], law) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        ks_distance([], law)


def test_ks_distance_dkw_sanity():
    rng = np.random.Generator(np.random.PCG64(7))
    xs = rng.standard_normal(100_000)
    assert ks_distance(xs, gaussian_law()) <= 0.01


def test_stable_pdf_normalization():
    for alpha in (0.6, 1.0, 1.5):
        assert stable_pdf_mass(alpha) == pytest.approx(1.0, abs=1e-6)


def test_stable_cdf_monotone():
    for alpha in (0.6, 1.0, 1.5):
        c = c_alpha(alpha)
        grid = np.linspace(-20 * c, 500 * c, 1000)
        vals = stable_cdf(alpha, grid)
        assert np.all(np.diff(vals) >= -1e-13)
        assert vals[0] >= 0 and vals[-1] <= 1


def test_stable_sampler_deterministic():
    a = sample_stable(1.9, 1000, seed=42)
    b = sample_stable(1.9, 1000, seed=42)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_stable(1.9, 1000, seed=43))
    clipped = np.clip(sample_stable(1.9, 10**6, seed=1), -50, 50)
    assert np.isfinite(clipped.mean())


def test_stable_heavy_right_tail():
    assert 1 - stable_cdf(1.5, 10.0)[0] > 1e-3


@pytest.mark.parametrize("alpha", [0.6, 0.8, 1.0, 1.25, 1.5])
def test_inversion_vs_cms_sampler(alpha):
    # Two independent routes: analytic inversion CDF against CMS samples.
    samples = sample_stable(alpha, 10**6, seed=2024)
    assert ks_distance(samples, stable_law(alpha)) <= 0.005

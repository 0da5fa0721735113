import numpy as np
import pytest
from scipy import integrate, stats

from socc_lab.channel import (GaussianNoise, MiddletonClassA, complex_gaussian, fading_mac_output,
                              mac_output, middleton_sample, substream)

MIDDLETON = [(1.5, 1.5), (0.1, 0.1), (1.0, 0.01), (10.0, 1.0)]


def test_mac_output_additivity():
    y = mac_output([np.ones(4), np.ones(4)], bias=3.0)
    np.testing.assert_array_equal(y, 5.0)
    np.testing.assert_array_equal(mac_output([np.zeros(3)], noise=GaussianNoise(0.0)), 0.0)


def test_mac_output_length_mismatch():
    with pytest.raises(ValueError):
        mac_output([np.ones(3), np.ones(4)])
    with pytest.raises(ValueError):
        mac_output([np.ones(3)], bias=np.ones(4))


def test_gaussian_output_variance():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, size=10**6)
    y = mac_output([x], noise=GaussianNoise(2.0), rng=rng)
    assert np.var(y - x) == pytest.approx(2.0, rel=0.02)


def test_invalid_noise_parameters():
    with pytest.raises(ValueError):
        GaussianNoise(-1.0)
    with pytest.raises(ValueError):
        MiddletonClassA(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        MiddletonClassA(1.0, 0.0, 1.0)


def mixture_kurtosis_oracle(A, gamma):
    # E[N^4] = 3 E[v_m^2]; v_m = (m/A + gamma)/(1+gamma) with m ~ Poisson(A)
    m = np.arange(0, 400)
    w = stats.poisson.pmf(m, A)
    v = (m / A + gamma) / (1 + gamma)
    return 3 * np.sum(w * v**2) / np.sum(w * v) ** 2


@pytest.mark.parametrize("A, gamma", MIDDLETON)
def test_middleton_variance_and_kurtosis(A, gamma):
    noise = MiddletonClassA(A, gamma, power=0.7)
    x = middleton_sample(noise, np.random.default_rng(1), 10**6)
    assert np.var(x) == pytest.approx(0.7, rel=0.02)
    assert noise.kurtosis() == pytest.approx(mixture_kurtosis_oracle(A, gamma), rel=1e-9)


def test_middleton_heavy_tails():
    noise = MiddletonClassA(0.1, 0.1, 1.0)
    x = noise.sample(np.random.default_rng(2), 10**6)
    assert stats.kurtosis(x, fisher=False) > 10
    assert noise.kurtosis() == pytest.approx(3 * (1 + 1 / (0.1 * 1.1**2)))


def test_middleton_gaussian_limit():
    assert MiddletonClassA(1e6, 1.0, 1.0).kurtosis() == pytest.approx(3.0, abs=1e-5)
    x = MiddletonClassA(1e4, 1.0, 1.0).sample(np.random.default_rng(3), 10**6)
    assert stats.kurtosis(x, fisher=False) == pytest.approx(3.0, abs=0.03)


def test_middleton_scalar_sample():
    assert np.ndim(middleton_sample(MiddletonClassA(1, 1, 1), np.random.default_rng(0))) == 0


@pytest.mark.parametrize("A, gamma", MIDDLETON)
def test_middleton_pdf_normalised(A, gamma):
    noise = MiddletonClassA(A, gamma, power=1.0)
    w, v = noise._terms()
    # integrate each Gaussian component piecewise; total mass must be 1
    s_max = np.sqrt(v.max())
    val, err = integrate.quad(noise.pdf, -60 * s_max, 60 * s_max, limit=500,
                              points=[0.0], epsabs=1e-13, epsrel=1e-13)
    assert abs(val - 1.0) <= 1e-9
    assert noise.cdf(60 * s_max) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("A, gamma", [(1.5, 1.5), (0.1, 0.1)])
def test_middleton_histogram_chi2(A, gamma):
    noise = MiddletonClassA(A, gamma, power=1.0)
    x = noise.sample(np.random.default_rng(4), 200_000)
    edges = np.quantile(x, np.linspace(0, 1, 41))
    edges[0], edges[-1] = -np.inf, np.inf
    counts, _ = np.histogram(x, bins=edges)
    expected = np.diff(noise.cdf(edges)) * x.size
    # bins are data-driven but equiprobable; keep only well-populated ones
    stat, p = stats.chisquare(counts, expected * counts.sum() / expected.sum())
    assert p > 0.01


def test_gaussian_pdf_and_zero_power():
    g = GaussianNoise(4.0)
    assert g.pdf(0.0) == pytest.approx(1 / np.sqrt(8 * np.pi))
    np.testing.assert_array_equal(GaussianNoise(0.0).sample(None, 5), np.zeros(5))


def test_substream_determinism():
    a = substream(9, 3, 1).normal(size=100)
    substream(9, 0, 0).normal(size=1000)
    b = substream(9, 3, 1).normal(size=100)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, substream(9, 3, 2).normal(size=100))
    assert not np.array_equal(a, substream(10, 3, 1).normal(size=100))


def test_fading_unit_gain_is_two_real_uses():
    rng = np.random.default_rng(5)
    x = rng.uniform(-1, 1, size=1000)
    y = fading_mac_output([x.astype(complex)], [1.0])
    np.testing.assert_array_equal(y.real, x)
    np.testing.assert_array_equal(y.imag, 0.0)


def test_fading_rotation():
    y = fading_mac_output([np.ones(2)], [1j])
    np.testing.assert_allclose(y, [1j, 1j])
    with pytest.raises(ValueError):
        fading_mac_output([np.ones(2), np.ones(2)], [1.0])
    with pytest.raises(ValueError):
        fading_mac_output([np.ones(2), np.ones(3)], [1.0, 1.0])


def test_complex_noise_conventions():
    rng = np.random.default_rng(6)
    z = complex_gaussian(2.0, rng, 10**6)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(2.0, rel=0.02)
    assert np.var(z.real) == pytest.approx(1.0, rel=0.02)
    assert abs(np.corrcoef(z.real, z.imag)[0, 1]) < 0.005
    z = complex_gaussian(2.0, rng, 10**6, per_real=True)
    assert np.var(z.imag) == pytest.approx(2.0, rel=0.02)
    y = fading_mac_output([np.zeros(10**6)], [1.0], noise_power=2.0, rng=rng)
    assert np.var(y.real) == pytest.approx(1.0, rel=0.02)

import math

import numpy as np
import pytest
from scipy import integrate

from besimc import (
    BivariateNormalParams,
    HalfNormalParams,
    RandomStream,
    half_normal_moments,
    half_normal_pdf,
    sample_bivariate_normal,
    sample_half_normal,
    sample_std_normal,
)
from besimc.distributions import half_normal_logpdf
from besimc.errors import DomainError

# mpmath: 10 + 4*sqrt(2/pi) and 16*(1 - 2/pi)
HN_10_4_MEAN = 13.1915382432114614
HN_10_4_VAR = 5.81408364211869851


def test_stream_is_a_pure_value():
    s = RandomStream(11, 2)
    assert np.array_equal(sample_std_normal(s, 50), sample_std_normal(s, 50))
    assert not np.array_equal(sample_std_normal(s, 50), sample_std_normal(RandomStream(11, 3), 50))
    assert not np.array_equal(sample_std_normal(s.substream(0), 50), sample_std_normal(s.substream(1), 50))
    assert s.substream(4, 1) == RandomStream(11, 2, (4, 1))


def test_generator_continues_while_stream_restarts():
    g = RandomStream(5).generator()
    a = sample_std_normal(g, 10)
    b = sample_std_normal(g, 10)
    assert not np.array_equal(a, b)
    assert np.array_equal(np.concatenate([a, b]), sample_std_normal(RandomStream(5), 20))


@pytest.mark.parametrize("bad", [-1, 2 ** 64, 1.5, True])
def test_stream_rejects_bad_seed(bad):
    with pytest.raises(DomainError):
        RandomStream(bad)


def test_std_normal_clt_band():
    z = sample_std_normal(RandomStream(1), 10 ** 6)
    assert abs(z.mean()) <= 4e-3
    assert abs(z.var() - 1.0) <= 6e-3


def test_params_validation():
    with pytest.raises(DomainError):
        HalfNormalParams(0.0, 0.0)
    with pytest.raises(DomainError):
        HalfNormalParams(math.nan, 1.0)
    for rho in (1.0, -1.0, 2.0):
        with pytest.raises(DomainError):
            BivariateNormalParams(rho)
    with pytest.raises(DomainError):
        sample_half_normal(HalfNormalParams(), RandomStream(0), 0)


@pytest.mark.parametrize("xi,eta", [(10.0, 4.0), (-3.25, 0.5), (0.0, 1.0)])
def test_location_scale_pushforward(xi, eta):
    s = RandomStream(42, 7)
    base = sample_half_normal(HalfNormalParams(), s, 1000)
    assert np.array_equal(sample_half_normal(HalfNormalParams(xi, eta), s, 1000), xi + eta * base)
    assert base.min() >= 0.0


def test_density_normalization(rng):
    for _ in range(10):
        p = HalfNormalParams(rng.uniform(-20, 20), rng.uniform(0.1, 10))
        total = integrate.quad(lambda y: half_normal_pdf(p, y), p.xi, np.inf)[0]
        assert abs(total - 1.0) <= 1e-8


def test_density_support_and_log():
    p = HalfNormalParams(1.0, 2.0)
    assert half_normal_pdf(p, 0.999) == 0.0
    assert half_normal_pdf(p, 1.0) == pytest.approx(math.sqrt(2 / math.pi) / 2, rel=1e-15)
    assert half_normal_logpdf(p, 0.0) == -math.inf
    y = np.array([1.0, 2.5, 7.0])
    assert np.allclose(np.exp(half_normal_logpdf(p, y)), half_normal_pdf(p, y), rtol=1e-14)


def test_moments_match_reference_values(hn10_4):
    mean, var = half_normal_moments(hn10_4)
    assert abs(mean - HN_10_4_MEAN) <= 1e-13
    assert abs(var - HN_10_4_VAR) <= 1e-13
    y = sample_half_normal(hn10_4, RandomStream(3), 10 ** 6)
    assert abs(y.mean() - mean) <= 4 * math.sqrt(var / 1e6)


@pytest.mark.parametrize("rho", [0.0, 0.5])
def test_bivariate_correlation(rho):
    xy = sample_bivariate_normal(BivariateNormalParams(rho), RandomStream(8), 10 ** 6)
    assert xy.shape == (10 ** 6, 2)
    assert abs(np.corrcoef(xy.T)[0, 1] - rho) <= 0.01


def test_bivariate_conditional_mean_near_half():
    xy = sample_bivariate_normal(BivariateNormalParams(0.5), RandomStream(9), 10 ** 6)
    near = xy[np.abs(xy[:, 0] - 1.0) <= 0.1, 1]
    assert abs(near.mean() - 0.5) <= 0.03

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besimc import HalfNormalParams, RandomStream, sample_half_normal
from besimc import hn_estimators as hn
from besimc.errors import DegenerateSample, DomainError, SupportViolation
from oracles import ks_two_sample_pvalue

# mpmath quad of (2 - 2 Phi(t))^n, 30 digits
C_N = {
    2: 0.467389954510218137863625336616,
    5: 0.215692495767322014550673978389,
    10: 0.115152554365175179545698270263,
}
SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


def _hn(rng, n, xi=10.0, eta=4.0):
    return xi + eta * np.abs(rng.standard_normal(n))


class TestCn:
    def test_reference_values(self):
        assert abs(hn.c_n_quadrature(1).value - SQRT_2_OVER_PI) <= 1e-12
        for n, ref in C_N.items():
            assert abs(hn.c_n_quadrature(n).value - ref) <= 1e-10

    def test_bounds_and_type(self):
        c = hn.c_n_quadrature(10)
        assert c.n == 10 and 0 < c.value <= 0.1 * math.sqrt(math.pi / 2)
        assert c.abserr <= 1e-9
        with pytest.raises(DomainError):
            hn.c_n_quadrature(0)

    def test_large_n_is_finite(self):
        c = hn.c_n_quadrature(10 ** 4)
        assert 0 < c.value <= math.sqrt(math.pi / 2) / 1e4

    def test_mc_cross_check(self):
        mean, se = hn.c_n_mc(1, RandomStream(10), 10 ** 6, return_std_error=True)
        assert abs(mean - SQRT_2_OVER_PI) <= 0.002
        for n in (2, 5):
            mean, se = hn.c_n_mc(n, RandomStream(11, n), 10 ** 6, return_std_error=True)
            assert abs(mean - C_N[n]) <= 4 * se

    def test_mc_monotone(self):
        est = [hn.c_n_mc(n, RandomStream(12, n), 10 ** 5) for n in range(1, 11)]
        assert all(b < a + 0.005 for a, b in zip(est, est[1:]))


class TestClosedForms:
    def test_mle_example(self):
        assert hn.mle_location([1.0, 2.0, 3.0]) == 1.0
        assert hn.mle_scale([1.0, 2.0, 3.0]) == pytest.approx(math.sqrt(5 / 3), rel=1e-15)

    def test_constant_samples(self):
        y = [5.0, 5.0, 5.0]
        assert hn.unbiased_location(y) == 5.0
        assert hn.unbiased_scale(y) == 0.0
        assert hn.unbiased_scale_sq(y) == 0.0
        assert hn.mle_scale(y) == 0.0
        assert hn.mre_scale_known_location(y, 5.0) == 0.0
        assert hn.mvue_scale_known_location(y, 5.0) == 0.0
        with pytest.raises(DegenerateSample):
            hn.mre_scale(y)

    def test_unbiased_formula(self):
        y = np.array([10.3, 11.0, 14.2, 10.9])
        c = hn.c_n_quadrature(4).value
        expected = (SQRT_2_OVER_PI * y.min() - c * y.mean()) / (SQRT_2_OVER_PI - c)
        assert hn.unbiased_location(y) == pytest.approx(expected, rel=1e-14)

    def test_cn_mismatch(self):
        with pytest.raises(DomainError):
            hn.unbiased_location([1.0, 2.0, 3.0], hn.c_n_quadrature(4))
        assert hn.unbiased_scale([1.0, 2.0, 3.0], hn.c_n_quadrature(3)) == hn.unbiased_scale([1.0, 2.0, 3.0])

    def test_sample_validation(self):
        with pytest.raises(DomainError):
            hn.Sample([1.0])
        with pytest.raises(DomainError):
            hn.Sample([1.0, math.nan])
        s = hn.Sample([1.0, 2.0, 3.0])
        assert (s.n, s.minimum, s.mean, s.variance) == (3, 1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            s.values[0] = 9.0

    def test_mvue_over_t2_ratio_is_constant(self, rng):
        for n in (2, 5, 17):
            const = math.exp(math.lgamma(n / 2) + math.lgamma((n + 2) / 2) - 2 * math.lgamma((n + 1) / 2))
            for _ in range(5):
                y = _hn(rng, n)
                ratio = hn.mvue_scale_known_location(y, 10.0) / hn.mre_scale_known_location(y, 10.0)
                assert ratio == pytest.approx(const, rel=1e-14)

    def test_support_violation(self):
        with pytest.raises(SupportViolation):
            hn.mre_scale_known_location([1.0, 2.0], 1.5)
        with pytest.raises(SupportViolation):
            hn.mvue_scale_known_location([1.0, 2.0], 1.5)


finite = st.floats(-1e3, 1e3, allow_nan=False)
positive = st.floats(1e-2, 1e2)


@st.composite
def samples(draw, min_size=3, max_size=12):
    n = draw(st.integers(min_size, max_size))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return _hn(np.random.default_rng(seed), n, 0.0, 1.0)


def _close(a, b, scale):
    return abs(a - b) <= 1e-12 * max(1.0, abs(scale))


class TestEquivariance:
    @settings(max_examples=100, deadline=None)
    @given(samples(), finite, positive)
    def test_location_estimators(self, y, a, b):
        z = a + b * y
        span = abs(a) + b * float(np.max(y))
        assert _close(hn.unbiased_location(z), a + b * hn.unbiased_location(y), span)
        assert _close(hn.mle_location(z), a + b * hn.mle_location(y), span)
        assert _close(hn.pitman_location_known_scale(a + y, 1.3), a + hn.pitman_location_known_scale(y, 1.3), span)

    @settings(max_examples=100, deadline=None)
    @given(samples(), finite, positive)
    def test_scale_estimators(self, y, a, b):
        z = a + b * y
        span = b * float(np.max(y))
        for f in (hn.unbiased_scale, hn.mle_scale, hn.mre_scale):
            assert _close(f(z), b * f(y), span)
        assert _close(hn.unbiased_scale_sq(z), b * b * hn.unbiased_scale_sq(y), span * span)
        for f in (hn.mre_scale_known_location, hn.mvue_scale_known_location):
            assert _close(f(a + b * y, a), b * f(y, 0.0), span)

    def test_shift_leaves_unbiased_scale_exact(self):
        y = np.array([0.25, 1.5, 3.0, 0.75])
        assert hn.unbiased_scale(y + 8.0) == hn.unbiased_scale(y)


class TestOracles:
    def test_mre_scale_example(self):
        y = [1.0, 2.0, 4.0]
        assert abs(hn.mre_scale(y) - hn.mre_scale_oracle(y)) <= 1e-6

    def test_mre_scale_oracle_scaling(self):
        y = np.array([1.0, 2.0, 4.0, 1.5])
        assert abs(hn.mre_scale_oracle(3 * y) - 3 * hn.mre_scale_oracle(y)) <= 1e-6

    def test_pitman_example(self):
        y = [0.5, 1.0, 2.0]
        assert abs(hn.pitman_location_known_scale(y, 1.0) - hn.pitman_location_oracle(y, 1.0)) <= 1e-6

    def test_pitman_oracle_equivariance(self):
        y = np.array([0.5, 1.0, 2.0, 0.7])
        base = hn.pitman_location_oracle(y, 1.0)
        assert abs(hn.pitman_location_oracle(y + 3.0, 1.0) - (base + 3.0)) <= 1e-6
        assert abs(hn.pitman_location_oracle(2.5 * y, 2.5) - 2.5 * base) <= 1e-6

    def test_pitman_vanishing_gap(self):
        # gap ~ 1/sqrt(n): z stays bounded and the correction vanishes
        n = 10 ** 4
        y = np.full(n, 1.0)
        y[0] = 1.0 - 50.0 / n
        s = hn.Sample(y)
        t1 = hn.pitman_location_known_scale(s, 1.0)
        assert abs(t1 - s.mean) <= 0.02
        assert abs(t1 - hn.pitman_location_oracle(s, 1.0)) <= 1e-6

    def test_pitman_fixed_gap_tends_to_minimum(self):
        rng = np.random.default_rng(3)
        y = np.concatenate([[0.0], 1.0 + rng.uniform(-0.1, 0.1, 10 ** 4 - 1)])
        t1 = hn.pitman_location_known_scale(y, 1.0)
        assert abs(t1 - y.min()) <= 1e-3
        assert abs(t1 - hn.pitman_location_oracle(y, 1.0)) <= 1e-6


def _replicate(func, n, reps, params, seed):
    out = np.empty(reps)
    for r in range(reps):
        out[r] = func(sample_half_normal(params, RandomStream(seed, r), n))
    return out


class TestStatistical:
    @pytest.mark.parametrize("name,func,n,truth", [
        ("unbiased_location", hn.unbiased_location, 10, 10.0),
        ("unbiased_scale", hn.unbiased_scale, 10, 4.0),
        ("unbiased_scale_sq", hn.unbiased_scale_sq, 30, 16.0),
        ("mvue", lambda y: hn.mvue_scale_known_location(y, 10.0), 10, 4.0),
    ])
    def test_unbiased_within_4se(self, name, func, n, truth):
        vals = _replicate(func, n, 10 ** 4, HalfNormalParams(10.0, 4.0), 2024)
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - truth) <= 4 * se, name

    def test_unbiased_scale_distribution_free_in_xi(self):
        a = _replicate(hn.unbiased_scale, 10, 10 ** 4, HalfNormalParams(0.0, 2.0), 1)
        b = _replicate(hn.unbiased_scale, 10, 10 ** 4, HalfNormalParams(10.0, 2.0), 2)
        assert ks_two_sample_pvalue(a, b) > 0.01

    def test_t2_beats_mvue_known_location(self):
        p = HalfNormalParams(0.0, 1.0)
        t2 = _replicate(lambda y: hn.mre_scale_known_location(y, 0.0), 10, 10 ** 4, p, 5)
        mv = _replicate(lambda y: hn.mvue_scale_known_location(y, 0.0), 10, 10 ** 4, p, 5)
        diff = (t2 - 1) ** 2 - (mv - 1) ** 2
        assert diff.mean() <= 2 * diff.std(ddof=1) / math.sqrt(diff.size)


def test_c_n_bound_chain():
    for n in range(1, 51):
        c, mid, q = hn.c_n_bounds(n)
        assert c > 0 and c - mid <= 1e-9 and mid - q <= 1e-9

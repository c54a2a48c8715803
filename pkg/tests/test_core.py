"""Parametrization and exact sampling of the one-sided stable laws.

Expected constants were computed independently with mpmath at 30 digits;
the alpha=1/2 subordinator law is checked against its closed-form CDF
erfc(1/(2 sqrt(x))) and both regimes against their Laplace transforms
exp(-t lam^alpha) (alpha < 1) and exp(+t lam^alpha) (alpha > 1).
"""

import math

import numpy as np
import pytest
from scipy.special import erfc
from scipy.stats import kstest, ks_2samp
from scipy import integrate

from stableavoid.core import (
    Regime,
    levy_density,
    levy_tail,
    make_params,
    sample_increment,
    sample_increments,
    small_jump_mean,
)
from stableavoid.errors import DomainError
from stableavoid.mc import ks_critical
from stableavoid.rng import RngStream


class TestMakeParams:
    def test_subordinator_regime(self):
        p = make_params(0.5)
        assert p.regime is Regime.SUBORDINATOR
        assert p.rho == 1.0

    def test_spectrally_positive_regime(self):
        p = make_params(1.5)
        assert p.regime is Regime.SPECTRALLY_POSITIVE
        assert p.rho == pytest.approx(1.0 / 3.0)

    @pytest.mark.parametrize("bad", [1.0, 2.0, 0.0, -0.5, 2.5])
    def test_excluded_indices_rejected(self, bad):
        with pytest.raises(DomainError, match="excluded|outside"):
            make_params(bad)


class TestLevyMeasure:
    def test_density_value_alpha_half(self):
        # Gamma(3/2) sin(pi/2) / pi = 1/(2 sqrt(pi)), mpmath: 0.28209479177387814
        p = make_params(0.5)
        assert levy_density(p, 1.0) == pytest.approx(
            0.28209479177387814, abs=1e-15
        )

    def test_no_negative_jumps(self):
        assert levy_density(make_params(1.5), -0.5) == 0.0
        assert levy_density(make_params(0.5), -2.0) == 0.0

    def test_power_law_ratio(self):
        for alpha in (0.3, 0.5, 1.5, 1.8):
            p = make_params(alpha)
            ratio = levy_density(p, 2.0) / levy_density(p, 1.0)
            assert ratio == pytest.approx(2.0 ** (-alpha - 1.0), rel=1e-12)

    def test_density_rejects_zero(self):
        with pytest.raises(DomainError):
            levy_density(make_params(0.5), 0.0)

    def test_tail_value(self):
        # 2 * (1/(2 sqrt(pi))) * 0.01^(-1/2), mpmath: 5.641895835477563
        p = make_params(0.5)
        assert levy_tail(p, 0.01) == pytest.approx(5.641895835477563, rel=1e-12)

    def test_small_jump_mean_value(self):
        # independent quadrature oracle of int_0^1 x density dx = 1/sqrt(pi)
        p = make_params(0.5)
        assert small_jump_mean(p, 1.0) == pytest.approx(
            0.5641895835477563, rel=1e-12
        )

    def test_small_jump_mean_rejected_above_one(self):
        with pytest.raises(DomainError, match="diverges"):
            small_jump_mean(make_params(1.5), 0.1)

    def test_tail_matches_quadrature(self):
        for alpha in (0.3, 0.8, 1.5):
            p = make_params(alpha)
            for eps in (0.01, 1.0):
                num, err = integrate.quad(
                    lambda x: levy_density(p, x), eps, np.inf,
                    epsabs=1e-13, epsrel=1e-13, limit=400,
                )
                assert abs(levy_tail(p, eps) - num) <= max(10.0 * err, 1e-10)

    def test_small_jump_mean_matches_quadrature(self):
        for alpha in (0.3, 0.5, 0.8):
            p = make_params(alpha)
            num, err = integrate.quad(
                lambda x: x * levy_density(p, x), 0.0, 0.01
            )
            assert small_jump_mean(p, 0.01) == pytest.approx(num, abs=1e-10)


class TestSampler:
    def test_subordinator_strictly_positive(self):
        p = make_params(0.5)
        x = sample_increments(p, 1.0, 100_000, RngStream(1))
        assert (x > 0.0).all()
        x = sample_increments(make_params(0.8), 1e-3, 50_000, RngStream(2))
        assert (x > 0.0).all()

    def test_determinism(self):
        p = make_params(1.5)
        a = sample_increments(p, 0.3, 1000, RngStream(11, 4))
        b = sample_increments(p, 0.3, 1000, RngStream(11, 4))
        np.testing.assert_array_equal(a, b)

    def test_alpha_half_closed_form_cdf(self):
        # X_1 for alpha=1/2 has CDF erfc(1/(2 sqrt(x)))
        p = make_params(0.5)
        x = sample_increments(p, 1.0, 100_000, RngStream(3))
        stat = kstest(x, lambda v: erfc(1.0 / (2.0 * np.sqrt(v)))).statistic
        assert stat < ks_critical(100_000, 0.01)

    @pytest.mark.parametrize("alpha", [0.3, 0.8])
    def test_subordinator_laplace_transform(self, alpha):
        p = make_params(alpha)
        x = sample_increments(p, 1.0, 400_000, RngStream(4))
        for lam in (0.5, 2.0):
            vals = np.exp(-lam * x)
            mc = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(x.size)
            assert abs(mc - math.exp(-lam ** alpha)) < 4.0 * se + 1e-4

    @pytest.mark.parametrize("alpha", [1.2, 1.8])
    def test_spectrally_positive_laplace_transform(self, alpha):
        p = make_params(alpha)
        x = sample_increments(p, 1.0, 400_000, RngStream(5))
        for lam in (0.5, 1.0):
            vals = np.exp(-lam * x)
            mc = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(x.size)
            assert abs(mc - math.exp(lam ** alpha)) < 4.0 * se + 2e-3

    def test_mean_zero_above_one(self):
        # centered regime; the self-normalized test tolerates the heavy tail
        p = make_params(1.5)
        x = sample_increments(p, 1.0, 1_000_000, RngStream(6))
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean()) < 4.0 * se

    def test_scaling_relation(self):
        # c * X_(c^-alpha) has the law of X_1
        for alpha in (0.5, 1.5):
            p = make_params(alpha)
            c = 2.0
            a = c * sample_increments(p, c ** -alpha, 100_000, RngStream(7))
            b = sample_increments(p, 1.0, 100_000, RngStream(8))
            stat = ks_2samp(a, b).statistic
            assert stat < ks_critical(100_000, 0.01, 100_000)

    def test_big_jump_frequency_matches_levy_tail(self):
        # P(X_dt > y) ~ dt * tail(y) for small dt pins the jump normalization
        for alpha in (0.5, 1.5):
            p = make_params(alpha)
            dt = 1e-3
            x = sample_increments(p, dt, 1_000_000, RngStream(9))
            for y in (1.0, 2.0):
                expect = dt * levy_tail(p, y)
                got = (x > y).mean()
                se = math.sqrt(expect / x.size)
                assert abs(got - expect) < 4.0 * se + 0.1 * expect

    def test_scalar_wrapper(self):
        p = make_params(0.5)
        v = sample_increment(p, 2.0, RngStream(10))
        assert isinstance(v, float) and v > 0.0

    def test_dt_must_be_positive(self):
        with pytest.raises(DomainError):
            sample_increments(make_params(0.5), 0.0, 1, RngStream(0))

"""Limit checks: fits on synthetic power laws, survival exponents on
asymptotic grids, profile ratios, the exact clock-survival bound."""

import math

import numpy as np
import pytest

from stableavoid.asymptotics import (
    FitResult,
    cancellation_rate,
    eq_survival,
    fit_power_law,
    profile_ratio_check,
    survival_tail_exponent,
    upper_bound_check,
)
from stableavoid.core import make_params
from stableavoid.errors import DegenerateConditioningError, DomainError
from stableavoid.paths import PathConfig
from stableavoid.rng import RngStream

CFG = PathConfig(dt=1e-3, horizon=100.0, eps=1e-4, refine_levels=4, dt_cap=2.0)


class TestFitPowerLaw:
    def test_recovers_synthetic_exponent(self):
        rng = np.random.default_rng(5)
        x = np.array([1.0, 2.0, 5.0, 10.0, 30.0, 100.0])
        true = 3.7 * x ** -0.42
        se = 0.01 * true
        noisy = true * (1.0 + 0.01 * rng.standard_normal(x.size))
        fit = fit_power_law(x, noisy, se)
        assert fit.exponent == pytest.approx(-0.42, abs=0.02)
        assert math.exp(fit.intercept) == pytest.approx(3.7, rel=0.05)
        assert fit.r_squared > 0.99

    def test_high_error_points_excluded(self):
        x = np.array([1.0, 2.0, 4.0, 8.0])
        y = np.array([1.0, 0.5, 0.25, 1000.0])
        se = np.array([0.01, 0.01, 0.01, 900.0])
        fit = fit_power_law(x, y, se)
        assert fit.exponent == pytest.approx(-1.0, abs=0.01)

    def test_zero_estimate_degenerates(self):
        with pytest.raises(DegenerateConditioningError):
            fit_power_law(
                np.array([1.0, 2.0]), np.array([0.5, 0.0]),
                np.array([0.01, 0.01]),
            )

    def test_scale_free(self):
        x = np.array([1.0, 3.0, 9.0, 27.0])
        y = 2.0 * x ** -0.7
        se = 0.01 * y
        a = fit_power_law(x, y, se)
        b = fit_power_law(2.0 * x, y, se)
        assert a.exponent == pytest.approx(b.exponent, abs=1e-9)

    def test_result_validation(self):
        with pytest.raises(ValueError):
            FitResult(exponent=1.0, intercept=0.0, r_squared=0.5, grid=[])
        with pytest.raises(ValueError):
            FitResult(exponent=1.0, intercept=0.0, r_squared=1.5,
                      grid=[(1.0, 1.0, 0.0)])


class TestSurvivalTailExponent:
    def test_asymptotic_grid_recovers_lemma_exponent(self):
        # on s in [500, 5000] the decay has settled near 1/alpha - 1
        params = make_params(1.5)
        cfg = PathConfig(dt=1e-3, horizon=5000.0, eps=1e-4, refine_levels=4,
                         dt_cap=2.0)
        fit = survival_tail_exponent(
            params, -2.0, [500.0, 1000.0, 2000.0, 3500.0, 5000.0], cfg,
            30_000, RngStream(1),
        )
        assert fit.exponent == pytest.approx(1.0 / 1.5 - 1.0, abs=0.05)
        assert fit.r_squared >= 0.98

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            survival_tail_exponent(make_params(1.5), -2.0, [1.0, 2.0], CFG,
                                   100, RngStream(2))
        with pytest.raises(DomainError):
            survival_tail_exponent(make_params(0.5), -2.0, [1, 2, 3, 4], CFG,
                                   100, RngStream(2))
        with pytest.raises(DomainError):
            survival_tail_exponent(make_params(1.5), 2.0, [1, 2, 3, 4], CFG,
                                   100, RngStream(2))


class TestEqSurvival:
    def test_instant_clock_wins(self):
        est = eq_survival(make_params(1.5), -2.0, 100.0, CFG, 3_000,
                          RngStream(3))
        assert est.value > 0.97

    def test_consistent_with_kill_time_transform(self):
        # E[1 - e^{-q T}] over recorded kill times is a Rao-Blackwellized
        # version of the same probability; the two routes must agree
        from stableavoid.asymptotics import _kill_time_batch
        from stableavoid.mc import gather, run_batched

        params = make_params(1.5)
        q = 0.01
        n = 40_000
        est = eq_survival(params, -2.0, q, CFG, n, RngStream(4))
        batches = run_batched(
            _kill_time_batch, (params, -2.0, 2000.0,
                               PathConfig(dt=1e-3, horizon=2000.0,
                                          dt_cap=2.0)), n, RngStream(5)
        )
        t_kill = gather(batches)
        vals = 1.0 - np.exp(-q * np.where(np.isinf(t_kill), 2000.0, t_kill))
        ref = vals.mean()
        se = math.hypot(est.stderr, vals.std(ddof=1) / math.sqrt(n))
        cens = np.isinf(t_kill).mean() * math.exp(-q * 2000.0)
        assert abs(est.value - ref) < 4.0 * se + cens + 1e-3


class TestTauberianConsistency:
    def test_scaled_s_and_q_survival_proportional(self):
        # s^(1-1/alpha) P(s<T) and q^(1/alpha-1) P(e_q<T) carry the same
        # constant up to a Gamma factor: their ratio at matched q = 1/s must
        # be flat across the asymptotic range
        from stableavoid.asymptotics import _kill_time_batch
        from stableavoid.mc import gather, run_batched

        params = make_params(1.5)
        n = 40_000
        cfg = PathConfig(dt=1e-3, horizon=2000.0, eps=1e-4, refine_levels=4,
                         dt_cap=2.0)
        batches = run_batched(
            _kill_time_batch, (params, -2.0, 2000.0, cfg), n, RngStream(20)
        )
        t_kill = gather(batches)
        ratios = []
        for i, s in enumerate((500.0, 1000.0, 2000.0)):
            a = s ** (1.0 - 1.0 / 1.5) * (t_kill > s).mean()
            est = eq_survival(params, -2.0, 1.0 / s, CFG, n, RngStream(21, i))
            b = (1.0 / s) ** (1.0 / 1.5 - 1.0) * est.value
            ratios.append(b / a)
        mid = sorted(ratios)[1]
        assert max(abs(r / mid - 1.0) for r in ratios) < 0.10


class TestProfile:
    def test_duplicate_point_ratio_one(self):
        pts = profile_ratio_check(
            make_params(1.5), [-2.0, -2.0], 0.01, CFG, 5_000, RngStream(6)
        )
        assert pts[1].predicted == 1.0
        assert pts[1].ratio == pytest.approx(1.0, abs=4.0 * pts[1].stderr)

    def test_predicted_column(self):
        pts = profile_ratio_check(
            make_params(1.5), [-2.0, -3.0, -5.0], 0.1, CFG, 2_000,
            RngStream(7),
        )
        assert pts[1].predicted == pytest.approx(math.sqrt(2.0))
        assert pts[2].predicted == pytest.approx(2.0)

    def test_needs_two_points(self):
        with pytest.raises(DomainError):
            profile_ratio_check(make_params(1.5), [-2.0], 0.1, CFG, 100,
                                RngStream(8))


class TestUpperBound:
    def test_large_q_trivially_bounded(self):
        pts = upper_bound_check(
            make_params(1.5), 2.0, [1.0], CFG, 2_000, RngStream(9)
        )
        assert pts[0].rhs_bound >= 1.0
        assert pts[0].lhs_estimate <= pts[0].rhs_bound

    def test_matches_exact_law_and_bound(self):
        # P(e_q < T) = 1 - exp(-(x0-1) q^(1/alpha)) <= q^(1/alpha) (x0-1)
        params = make_params(1.5)
        x0, q, n = 1.5, 0.1, 40_000
        pts = upper_bound_check(params, x0, [q], CFG, n, RngStream(10))
        exact = 1.0 - math.exp(-(x0 - 1.0) * q ** (2.0 / 3.0))
        assert abs(pts[0].lhs_estimate - exact) < 4.0 * pts[0].lhs_stderr + 1e-3
        assert pts[0].lhs_estimate <= pts[0].rhs_bound + 3.0 * pts[0].lhs_stderr

    def test_rejects_start_below(self):
        with pytest.raises(DomainError):
            upper_bound_check(make_params(1.5), -2.0, [0.1], CFG, 100,
                              RngStream(11))


class TestCancellation:
    def test_masses_decrease_with_q(self):
        fit = cancellation_rate(
            make_params(1.5), -2.0, 0.25, [1e-1, 1e-2, 1e-3],
            PathConfig(dt=1e-3, horizon=10.0, eps=1e-4, refine_levels=4,
                       dt_cap=1.0),
            60_000, RngStream(12),
        )
        masses = [g[1] for g in fit.grid]
        ses = [g[2] for g in fit.grid]
        assert fit.exponent > 0.0
        for i in range(len(masses) - 1):
            assert masses[i + 1] <= masses[i] + 3.0 * math.hypot(
                ses[i], ses[i + 1]
            )

    def test_rejects_start_above(self):
        with pytest.raises(DomainError):
            cancellation_rate(make_params(1.5), 2.0, 0.25, [0.1, 0.01], CFG,
                              100, RngStream(13))

import math

import numpy as np
import pytest
from scipy.special import erf
from scipy.stats import ks_2samp

from conecapture.pursuit_mc import (ExponentFit, InsufficientTailData,
                                    PursuitConfig, SurvivalCurve,
                                    fit_tail_exponent, predicted_exponent,
                                    simulate, survival_curve)


def _small(n=2, paths=2000, seed=7, **kw):
    base = dict(predators=n, dt=0.1, t_max=200.0, paths=paths, seed=seed)
    base.update(kw)
    return PursuitConfig(**base)


class TestSimulate:
    def test_seed_determinism(self):
        r1 = simulate(_small())
        r2 = simulate(_small())
        assert np.array_equal(r1.times, r2.times)
        assert np.array_equal(r1.censored, r2.censored)

    def test_partitioning_never_changes_results(self):
        r1 = simulate(_small())
        r2 = simulate(_small(chunk_size=127, block_steps=13))
        assert np.array_equal(r1.times, r2.times)

    def test_seed_actually_matters(self):
        r1 = simulate(_small(seed=1))
        r2 = simulate(_small(seed=2))
        assert not np.array_equal(r1.times, r2.times)

    def test_censoring_flags_match_times(self):
        res = simulate(_small())
        assert np.all(res.times[res.censored] == res.config.t_max)
        assert np.all(res.times[~res.censored] <= res.config.t_max)
        assert res.truncated_mean <= res.config.t_max

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PursuitConfig(predators=0, dt=0.1, t_max=1.0, paths=1, seed=0)
        with pytest.raises(ValueError):
            PursuitConfig(predators=1, dt=1e-9, t_max=1e3, paths=1, seed=0)
        with pytest.raises(ValueError):
            PursuitConfig(predators=1, dt=0.1, t_max=0.0, paths=1, seed=0)


class TestSurvivalCurve:
    def test_all_captured_tail_is_zero(self):
        cfg = _small(n=4, paths=500, t_max=2000.0)
        res = simulate(cfg)
        if res.censored.any():
            pytest.skip("run left censored paths; tail not fully observed")
        curve = survival_curve(res)
        assert curve.survival[-1] == 0.0

    def test_no_captures_full_censoring(self):
        # a huge initial gap cannot be crossed in a short horizon
        cfg = _small(paths=200, t_max=2.0, x0=500.0)
        res = simulate(cfg)
        curve = survival_curve(res)
        assert curve.censored == 200
        assert np.all(curve.survival == 1.0)

    def test_monotone_and_normalised(self):
        curve = survival_curve(simulate(_small()))
        assert np.all(np.diff(curve.survival) <= 0.0)
        assert curve.survival[0] <= 1.0
        assert curve.n_paths == 2000

    def test_one_predator_matches_reflection_law(self):
        # the prey-predator gap is Brownian with variance 2 per unit time,
        # so P(no capture by t) = erf(x0 / (2 sqrt t))
        cfg = PursuitConfig(predators=1, dt=0.02, t_max=200.0, paths=40_000,
                            seed=17)
        curve = survival_curve(simulate(cfg))
        i = int(np.argmin(np.abs(curve.times - 100.0)))
        exact = erf(1.0 / (2.0 * math.sqrt(curve.times[i])))
        assert abs(curve.survival[i] - exact) < 4.0 * curve.stderr[i] + 1e-3


class TestExponentFit:
    def test_recovers_synthetic_power_law(self):
        # exact Pareto tail with a = 0.9, capped at the horizon
        rng = np.random.default_rng(3)
        n = 200_000
        t0, a = 0.5, 0.9
        raw = t0 * rng.uniform(size=n) ** (-1.0 / a)
        t_max = 1000.0
        times = np.minimum(raw, t_max)
        cfg = PursuitConfig(predators=1, dt=0.01, t_max=t_max, paths=n,
                            seed=0)
        from conecapture.pursuit_mc import SimulationResult
        res = SimulationResult(times=times, censored=raw >= t_max,
                               config=cfg)
        fit = fit_tail_exponent(survival_curve(res))
        assert fit.a_hat == pytest.approx(0.9, abs=0.02)
        assert fit.ci_low <= fit.a_hat <= fit.ci_high

    def test_insufficient_tail_flagged(self):
        cfg = _small(paths=50)
        curve = survival_curve(simulate(cfg))
        with pytest.raises(InsufficientTailData):
            fit_tail_exponent(curve, window=(150.0, 199.0))

    def test_r_squared_reported(self):
        curve = survival_curve(simulate(_small(paths=20_000, seed=5)))
        fit = fit_tail_exponent(curve)
        assert 0.9 <= fit.r_squared <= 1.0
        assert fit.n_points >= 10


class TestStatisticalInvariances:
    def test_translation_invariance(self):
        base = simulate(_small(paths=10_000, seed=21))
        shifted = simulate(_small(paths=10_000, seed=22, origin=250.0))
        stat = ks_2samp(base.times, shifted.times)
        assert stat.pvalue > 0.01

    def test_diffusive_scaling_law(self):
        # doubling the gap and quadrupling time leaves survival unchanged
        beta = 2.0
        a = simulate(PursuitConfig(predators=2, dt=0.05, t_max=250.0,
                                   paths=10_000, seed=31))
        b = simulate(PursuitConfig(predators=2, dt=0.05 * beta ** 2,
                                   t_max=250.0 * beta ** 2, paths=10_000,
                                   seed=32, x0=beta))
        stat = ks_2samp(a.times, b.times / beta ** 2)
        assert stat.pvalue > 0.01

    def test_dt_refinement_within_ci(self):
        cfg1 = PursuitConfig(predators=2, dt=0.1, t_max=400.0, paths=40_000,
                             seed=41)
        cfg2 = PursuitConfig(predators=2, dt=0.05, t_max=400.0, paths=40_000,
                             seed=41)
        f1 = fit_tail_exponent(survival_curve(simulate(cfg1)))
        f2 = fit_tail_exponent(survival_curve(simulate(cfg2)))
        assert abs(f1.a_hat - f2.a_hat) < (f1.ci_high - f1.ci_low)


class TestPredictedExponent:
    def test_reference_values(self):
        assert predicted_exponent(1) == pytest.approx(0.5, abs=1e-12)
        assert predicted_exponent(2) == pytest.approx(0.75, abs=1e-12)
        assert predicted_exponent(3) == pytest.approx(0.9128, abs=2e-3)
        assert predicted_exponent(4) == pytest.approx(1.0057, abs=2e-3)
        assert predicted_exponent(5) == pytest.approx(1.05417466, abs=1e-6)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            predicted_exponent(0)


class TestAcceptanceScaleRuns:
    def test_fits_match_predictions(self, mc_runs):
        targets = {1: (0.50, 0.05), 2: (0.75, 0.07),
                   3: (0.9128, 0.10), 4: (1.0057, 0.12)}
        for n, (target, tol) in targets.items():
            _, fit = mc_runs["runs"][n]
            assert abs(fit.a_hat - target) <= tol, \
                f"n={n}: {fit.a_hat} vs {target} +- {tol}"

    def test_censoring_reported(self, mc_runs):
        for n in (1, 2, 3, 4):
            curve, _ = mc_runs["runs"][n]
            assert curve.censored >= 0
            assert curve.n_paths == 200_000

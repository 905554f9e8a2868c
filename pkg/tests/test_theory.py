import math

import numpy as np
import pytest

from rotorpair.observables import PuritySeries
from rotorpair.theory import (
    B2,
    GAMMA_OVER_EPS_SQ,
    InsufficientDecayError,
    SemiclassicalParams,
    classify_regime,
    fit_decay,
    g_correlator,
    gamma_from_correlator,
    onset_time,
    predict_purity,
    predict_purity_env,
    predict_rate,
)


def make_params(**kw):
    base = dict(lambda1=1.0, lambda2=1.0, gamma=0.275, n1=512, n2=512)
    base.update(kw)
    return SemiclassicalParams(**base)


def make_series(values, n1=512, n2=512):
    values = np.asarray(values, dtype=float)
    return PuritySeries(
        times=np.arange(len(values)), values=values, stderr=np.zeros(len(values)),
        n1=n1, n2=n2, k1=5.09, k2=5.09, eps=0.8, seed=0, n_initial_states=1,
    )


class TestPredictions:
    def test_purity_model_structure(self):
        p = make_params(lambda1=0.7, lambda2=1.4, gamma=0.1, tau1=2.0, tau2=1.0)
        # at t=0 every gated channel is closed and the model clips at 1
        assert predict_purity(p, 0) == pytest.approx(1.0)
        val = predict_purity(p, 10)
        expected = (
            math.exp(-0.7 * 10)  # theta(t > tau1) gate open
            + math.exp(-1.4 * 10)
            + math.exp(-2 * 0.1 * 10)
            + (10 > p.tauE1) / 512
            + (10 > p.tauE2) / 512
        )
        assert val == pytest.approx(expected)
        # channel gating: just before tau1 the slow channel is absent
        assert predict_purity(p, 1.5) == pytest.approx(
            math.exp(-1.4 * 1.5) + math.exp(-0.3), rel=1e-12
        )

    def test_rate_is_slowest_open_channel(self):
        p = make_params(lambda1=0.9, lambda2=1.5, gamma=1.0)
        assert predict_rate(p) == pytest.approx(0.9)  # 2*gamma = 2.0 caps at lambda1
        p = make_params(lambda1=0.9, lambda2=1.5, gamma=0.2)
        assert predict_rate(p) == pytest.approx(0.4)

    def test_env_model_saturates_at_single_inverse_n(self):
        p = make_params(lambda1=0.7, lambda2=3.9, gamma=6.88)
        late = predict_purity_env(p, 200)
        assert late == pytest.approx(1.0 / 512, rel=1e-6)
        # pure-pair model keeps both floor terms
        assert predict_purity(p, 200) == pytest.approx(2.0 / 512, rel=1e-6)

    def test_ehrenfest_defaults(self):
        p = make_params(lambda1=2.0, n1=512)
        assert p.tauE1 == pytest.approx(math.log(512) / 2.0)


class TestRegime:
    def test_classification_thresholds(self):
        n = 512
        # delta2 = B2/(N1 N2); gamma = 0.43 eps^2
        eps_low = math.sqrt(B2 / (n * n) / GAMMA_OVER_EPS_SQ) * 0.99
        assert classify_regime(eps_low, n, n).classification == "below-validity"
        assert classify_regime(0.8, n, n).classification == "valid-golden-rule"
        eps_high = math.sqrt(B2 / GAMMA_OVER_EPS_SQ) * 1.01
        assert classify_regime(eps_high, n, n).classification == "above-validity"

    def test_saturated_branch_needs_lyapunov_input(self):
        r = classify_regime(4.0, 512, 512)
        assert r.classification == "valid-golden-rule"
        r = classify_regime(4.0, 512, 512, lambda1=1.6, lambda2=1.6)
        assert r.classification == "valid-lyapunov-saturated"
        assert 2 * r.gamma > 1.6

    def test_report_fields(self):
        r = classify_regime(0.8, 512, 512)
        assert r.gamma == pytest.approx(GAMMA_OVER_EPS_SQ * 0.64)
        assert r.delta2 == pytest.approx(B2 / 512**2)
        assert r.b2 == pytest.approx(4 * math.pi)


class TestCorrelator:
    def test_zero_coupling_gives_zero(self):
        assert gamma_from_correlator(5.09, 5.09, 0.0) == 0.0
        assert g_correlator(5.09, 5.09, 0.0) == 0.0

    def test_scales_with_eps_squared(self):
        a = gamma_from_correlator(5.09, 5.09, 0.4, n_traj=20_000, seed=1)
        b = gamma_from_correlator(5.09, 5.09, 0.8, n_traj=20_000, seed=1)
        assert b == pytest.approx(4.0 * a, rel=1e-9)

    def test_instantaneous_term_dominates(self):
        """C(0) = eps^2 <sin^2> = eps^2/2 for uniform phases; the tail is a correction."""
        val = gamma_from_correlator(10.0, 10.0, 1.0, n_traj=50_000, seed=2)
        assert val == pytest.approx(0.5, abs=0.05)

    def test_deterministic(self):
        a = gamma_from_correlator(5.09, 5.09, 0.8, n_traj=10_000, seed=3)
        b = gamma_from_correlator(5.09, 5.09, 0.8, n_traj=10_000, seed=3)
        assert a == b

    def test_warns_outside_chaotic_regime(self):
        with pytest.warns(RuntimeWarning):
            gamma_from_correlator(0.5, 5.09, 0.8, n_traj=1000, seed=4)


class TestOnsetTime:
    def test_zero_g_never_activates(self):
        assert onset_time(1.0, 0.1, 0.0) == math.inf

    def test_fast_activation_clamps_to_zero(self):
        assert onset_time(0.5, 10.0, 100.0) == 0.0

    def test_formula(self):
        lam, sigma, g = 1.2, 0.11, 0.5
        assert onset_time(lam, sigma, g) == pytest.approx(
            math.log(lam / (sigma**2 * g)) / lam
        )

    def test_rejects_nonpositive_lambda(self):
        with pytest.raises(ValueError):
            onset_time(0.0, 0.1, 1.0)


class TestFitDecay:
    def recover(self, rate, n=512, kicks=25, tau=0.0, **params_kw):
        t = np.arange(kicks + 1, dtype=float)
        sat = 1.0 / n + 1.0 / n
        vals = np.clip(np.exp(-rate * np.maximum(t - tau, 0.0)) + sat, None, 1.0)
        series = make_series(vals, n1=n, n2=n)
        return fit_decay(series, make_params(**params_kw))

    def test_recovers_synthetic_rate(self):
        fit = self.recover(0.55)
        assert fit.rate == pytest.approx(0.55, rel=0.02)
        assert fit.saturation == pytest.approx(2.0 / 512)

    def test_window_starts_after_onset_when_lyapunov_dominated(self):
        # 2 gamma > min lambda selects the slow channel's onset
        fit_late = self.recover(1.0, tau=3.0, gamma=5.0, lambda1=1.0, lambda2=2.0, tau1=3.0)
        assert fit_late.window[0] == 4
        assert fit_late.rate == pytest.approx(1.0, rel=0.05)

    def test_golden_rule_channel_has_no_onset(self):
        fit = self.recover(0.4, gamma=0.2, lambda1=1.0, lambda2=1.0, tau1=5.0)
        assert fit.window[0] == 1

    def test_explicit_overrides(self):
        t = np.arange(26, dtype=float)
        vals = np.clip(np.exp(-0.5 * t) + 1.0 / 512, None, 1.0)
        series = make_series(vals)
        fit = fit_decay(series, make_params(), tau_onset=2.0, saturation=1.0 / 512)
        assert fit.window[0] == 3
        assert fit.rate == pytest.approx(0.5, rel=0.02)

    def test_insufficient_points_raises(self):
        vals = [1.0, 0.5, 0.01, 0.004, 0.0041, 0.0039, 0.004]
        with pytest.raises(InsufficientDecayError):
            fit_decay(make_series(vals), make_params())

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            fit_decay(make_series([1.0, 0.9, 0.8]), make_params())

    def test_nondecaying_series_fits_zero_rate(self):
        fit = fit_decay(make_series(np.ones(26)), make_params(gamma=0.0))
        assert fit.rate == pytest.approx(0.0, abs=1e-12)

    def test_rate_error_positive_for_noisy_input(self):
        rng = np.random.default_rng(5)
        t = np.arange(26, dtype=float)
        vals = np.clip(np.exp(-0.5 * t) * np.exp(rng.normal(0, 0.05, 26)) + 2 / 512.0, None, 1.0)
        fit = fit_decay(make_series(vals), make_params())
        assert fit.rate_error > 0.0


class TestParamsValidation:
    def test_negative_inputs_rejected(self):
        with pytest.raises(ValueError):
            make_params(gamma=-0.1)
        with pytest.raises(ValueError):
            make_params(lambda1=-1.0)

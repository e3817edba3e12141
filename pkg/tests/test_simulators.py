import numpy as np
import pytest
from scipy import stats

from tsgbm.core import ConfigError, DomainError
from tsgbm.simulators import (
    DEFAULT_BURN_IN,
    MechanismSpec,
    PriorSpec,
    sample_prior,
    simulate,
    state_space_simulate,
    stoch_vol_simulate,
    weibull_sample,
)
from tsgbm.core import ParameterSpace


class TestWeibull:
    def test_scale_equivariance(self):
        # same seed -> same uniforms, so the scale factors out exactly
        base = weibull_sample(1.0, 3.0, 100, seed=5).samples
        scaled = weibull_sample(7.5, 3.0, 100, seed=5).samples
        assert np.allclose(scaled, 7.5 * base, rtol=1e-14)

    def test_shape_power_relation(self):
        # y_gamma = y_1^(1/gamma) for matching uniform draws
        g1 = weibull_sample(1.0, 1.0, 100, seed=11).samples
        g4 = weibull_sample(1.0, 4.0, 100, seed=11).samples
        assert np.allclose(g4, g1 ** 0.25, rtol=1e-12)

    def test_positive_and_finite(self):
        y = weibull_sample(2.0, 0.5, 10_000, seed=1).samples
        assert (y > 0).all() and np.isfinite(y).all()

    def test_distribution_ks(self):
        y = weibull_sample(2.0, 2.0, 100_000, seed=3).samples
        stat, _ = stats.kstest(y, stats.weibull_min(c=2.0, scale=2.0).cdf)
        assert stat < 0.01

    @pytest.mark.parametrize("eta,gamma", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
    def test_domain(self, eta, gamma):
        with pytest.raises(DomainError):
            weibull_sample(eta, gamma, 10, seed=0)


def _reference_state_space(a, v11, v12, v2, burn_in, init=(0.0, 0.0)):
    T = v11.size
    x1 = np.empty(T)
    x2 = np.empty(T)
    x1[0], x2[0] = init
    for k in range(T - 1):
        x1[k + 1] = a * x1[k] + v11[k]
        x2[k + 1] = x1[k] + a * a * x2[k] + v12[k]
    y = a * x1 + x2 + v2
    return y[burn_in:]


class TestStateSpace:
    def test_zero_noise_recursion(self):
        a, T, burn = 0.5, 12, 0
        zeros = np.zeros(T)
        y = state_space_simulate(
            a, T, seed=0, burn_in=burn, init=(1.0, 2.0),
            noise={"v11": zeros, "v12": zeros, "v2": zeros},
        ).samples
        ref = _reference_state_space(a, zeros, zeros, zeros, burn, init=(1.0, 2.0))
        assert np.allclose(y, ref, atol=1e-12)

    def test_scripted_noise_matches_reference_loop(self):
        rng = np.random.default_rng(8)
        a, N, burn = -0.7, 40, 10
        T = N + burn
        noise = {
            "v11": rng.standard_normal(T),
            "v12": rng.standard_normal(T),
            "v2": 0.1 * rng.standard_normal(T),
        }
        y = state_space_simulate(a, N, seed=0, burn_in=burn, noise=noise).samples
        ref = _reference_state_space(a, noise["v11"], noise["v12"], noise["v2"], burn)
        assert np.allclose(y, ref, rtol=1e-10, atol=1e-12)

    def test_output_length_and_burn_in(self):
        y = state_space_simulate(0.3, 55, seed=4).samples
        assert y.size == 55

    def test_measurement_noise_variance(self):
        # a = 0 with zeroed state noise isolates the measurement noise
        T = DEFAULT_BURN_IN + 200_000
        rng = np.random.default_rng(10)
        noise = {"v11": np.zeros(T), "v12": np.zeros(T), "v2": 0.1 * rng.standard_normal(T)}
        y = state_space_simulate(0.0, 200_000, seed=0, noise=noise).samples
        assert abs(np.var(y) - 0.01) < 0.001

    def test_wrong_script_length(self):
        with pytest.raises(DomainError):
            state_space_simulate(0.1, 10, seed=0, noise={"v11": np.zeros(3), "v12": np.zeros(3), "v2": np.zeros(3)})


class TestStochVol:
    def test_log_square_transform_identity(self):
        # identical seed -> identical noise streams, so ybar = ln(y^2) exactly
        raw = stoch_vol_simulate(0.1, 0.75, 500, seed=21).samples
        bar = stoch_vol_simulate(0.1, 0.75, 500, seed=21, transformed=True).samples
        assert np.allclose(bar, np.log(raw * raw), rtol=1e-12)

    def test_zero_noise_state_constant_at_stationary_mean(self):
        a, b, N = 0.2, 0.6, 8
        T = N + DEFAULT_BURN_IN
        noise = {"v": np.zeros(T), "r": np.ones(T)}
        seq, x = stoch_vol_simulate(a, b, N, seed=0, noise=noise, return_state=True)
        assert np.allclose(x, a / (1 - b), atol=1e-12)
        # r = 1 makes y = sqrt(exp(x)) exactly
        assert np.allclose(seq.samples, np.sqrt(np.exp(x)), rtol=1e-14)

    def test_zero_noise_recursion_from_init(self):
        a, b = 0.5, 0.5
        T = 5
        noise = {"v": np.zeros(T), "r": np.ones(T)}
        _, x = stoch_vol_simulate(a, b, 5, seed=0, burn_in=0, init=0.0, noise=noise, return_state=True)
        ref = np.empty(T)
        ref[0] = 0.0
        for k in range(T - 1):
            ref[k + 1] = a + b * ref[k]
        assert np.allclose(x, ref, atol=1e-12)

    def test_b_equal_one_needs_init(self):
        with pytest.raises(DomainError):
            stoch_vol_simulate(0.1, 1.0, 10, seed=0)

    def test_divergence_detected(self):
        with pytest.raises(DomainError):
            stoch_vol_simulate(0.0, 1.6, 2000, seed=0, init=5.0)


class TestDispatchAndPrior:
    def test_simulate_dispatch_shapes(self):
        for kind, theta in [("weibull", [2.0, 2.0]), ("state_space_1p", [0.3]), ("stoch_vol", [0.1, 0.75])]:
            y = simulate(MechanismSpec(kind, 64), np.asarray(theta), seed=1)
            assert y.samples.size == 64

    def test_simulate_wrong_dims(self):
        with pytest.raises(DomainError):
            simulate(MechanismSpec("weibull", 10), np.array([2.0]), seed=0)

    def test_unknown_mechanism(self):
        with pytest.raises(ConfigError):
            MechanismSpec("cauchy", 10)

    def test_sample_prior_bounds_and_determinism(self):
        prior = PriorSpec(ParameterSpace(np.array([1.0, 1.0]), np.array([20.0, 20.0])))
        a = sample_prior(prior, 500, seed=3)
        b = sample_prior(prior, 500, seed=3)
        assert a.shape == (500, 2)
        assert np.array_equal(a, b)
        assert (a >= 1.0).all() and (a <= 20.0).all()
        assert not np.array_equal(a, sample_prior(prior, 500, seed=4))

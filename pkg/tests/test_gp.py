"""GP posterior, information-gain estimation, and the a-priori pipeline."""

import math

import numpy as np
import pytest

from acp import (
    INFINITE_COST,
    EstimationTask,
    GPPosterior,
    HypothesisGrid,
    RBFKernel,
    a_priori_estimate,
    estimate_total_information,
    gaussian_channel_gain,
    information_gain,
    monte_carlo_error,
    propagate_estimate_error,
    surrogate_error_bound,
)
from acp.slope import estimation_task_for

SLOPE_PRIOR_VAR = 4.0 / 3.0  # variance of a uniform slope on [-2, 2]


def closed_form_linear_gain(x: float, sigma: float, prior_var: float = SLOPE_PRIOR_VAR) -> float:
    """Bayesian linear regression gain for one query at x under noise sigma."""
    return 0.5 * math.log2(1.0 + x * x * prior_var / sigma**2)


def calibrated_posterior(x: float, sigma: float) -> GPPosterior:
    """GP whose outcome predictive at x matches the linear task exactly."""
    signal = max(x * x * SLOPE_PRIOR_VAR, 1e-9)
    return GPPosterior(RBFKernel(lengthscale=1.0, signal_variance=signal), noise_variance=sigma**2)


class TestGPPosterior:
    def test_prior_prediction(self):
        post = GPPosterior(RBFKernel(1.0, 2.0), noise_variance=0.5)
        mean, var = post.predict(0.3)
        assert mean == 0.0
        assert var == 2.0

    def test_single_observation_closed_form(self):
        sf2, sn2 = 2.0, 0.5
        post = GPPosterior(RBFKernel(1.0, sf2), sn2).with_observation(0.0, 1.0)
        _, var = post.predict(0.0)
        assert var == pytest.approx(sn2 * sf2 / (sf2 + sn2), rel=1e-9)

    def test_far_query_reverts_to_prior(self):
        post = GPPosterior(RBFKernel(1.0, 2.0), 0.5).with_observation(0.0, 1.0)
        mean, var = post.predict(60.0)
        assert mean == pytest.approx(0.0, abs=1e-6)
        assert var == pytest.approx(2.0, abs=1e-6)

    def test_variance_never_increases_with_data(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            kernel = RBFKernel(float(rng.uniform(0.3, 3)), float(rng.uniform(0.5, 4)))
            post = GPPosterior(kernel, float(rng.uniform(0.05, 1)))
            for _ in range(int(rng.integers(1, 6))):
                post = post.with_observation(float(rng.uniform(-3, 3)), float(rng.normal()))
            grown = post.with_observation(float(rng.uniform(-3, 3)), float(rng.normal()))
            queries = rng.uniform(-4, 4, 100)
            before = np.array([post.predict(q)[1] for q in queries])
            after = np.array([grown.predict(q)[1] for q in queries])
            assert (after <= before + 1e-9).all()

    def test_mean_interpolates_data(self):
        post = GPPosterior(RBFKernel(1.0, 4.0), 1e-6).with_observation(1.0, 2.5)
        mean, _ = post.predict(1.0)
        assert mean == pytest.approx(2.5, abs=1e-4)

    def test_rejects_nonpositive_noise(self):
        with pytest.raises(ValueError):
            GPPosterior(RBFKernel(1.0, 1.0), 0.0)


class TestChannelGain:
    def test_half_bit_at_equal_variances(self):
        assert gaussian_channel_gain(0.5, 0.5) == pytest.approx(0.5)

    def test_one_bit_at_three_to_one(self):
        assert gaussian_channel_gain(1.5, 0.5) == pytest.approx(1.0)

    def test_vanishes_with_signal(self):
        assert gaussian_channel_gain(1e-12, 1.0) == pytest.approx(0.0, abs=1e-9)

    def test_monotone(self):
        vs = np.linspace(0.1, 5, 40)
        gains = [gaussian_channel_gain(v, 1.0) for v in vs]
        assert all(b > a for a, b in zip(gains, gains[1:]))
        noises = np.linspace(0.1, 5, 40)
        gains_n = [gaussian_channel_gain(1.0, n) for n in noises]
        assert all(b < a for a, b in zip(gains_n, gains_n[1:]))


class TestInformationGain:
    def test_concentrated_posterior_gains_nothing(self):
        probs = np.zeros(101)
        probs[50] = 1.0
        grid = HypothesisGrid(np.linspace(-2, 2, 101), probs)
        post = calibrated_posterior(3.0, 0.5)
        assert information_gain(post, 3.0, grid, 256, seed=0) <= 0.05

    def test_never_exceeds_prior_entropy(self):
        rng = np.random.default_rng(9)
        grid = HypothesisGrid.uniform(-2, 2, 101)
        ceiling = grid.prior_entropy()
        for _ in range(10):
            x = float(rng.uniform(-3, 3))
            sigma = float(rng.uniform(0.05, 2))
            post = GPPosterior(RBFKernel(1.0, 4.0), sigma**2)
            g = information_gain(post, x, grid, 64, seed=int(rng.integers(1 << 30)))
            assert 0.0 <= g <= ceiling

    @pytest.mark.parametrize("x", [-3.0, -1.0, 0.0, 1.0, 3.0])
    @pytest.mark.parametrize("sigma", [0.1, 0.5, 1.0])
    def test_matches_closed_form_linear_gain(self, x, sigma):
        grid = HypothesisGrid.uniform(-2, 2, 401)
        post = calibrated_posterior(x, sigma)
        estimate = information_gain(post, x, grid, 4096, seed=0)
        assert estimate == pytest.approx(closed_form_linear_gain(x, sigma), abs=0.1)

    def test_zero_prior_cells_stay_empty_under_extreme_draws(self):
        # a huge predictive variance forces outcome draws whose likelihood is
        # astronomically small everywhere; mass must not leak into cells the
        # prior rules out
        probs = np.zeros(101)
        probs[50] = 1.0
        grid = HypothesisGrid(np.linspace(-2, 2, 101), probs)
        post = GPPosterior(RBFKernel(1.0, 1e6), noise_variance=0.25)
        assert information_gain(post, 3.0, grid, 64, seed=0) == 0.0

    def test_common_random_numbers_are_deterministic(self):
        grid = HypothesisGrid.uniform(-2, 2, 201)
        post = calibrated_posterior(2.0, 0.5)
        a = information_gain(post, 2.0, grid, 64, seed=77)
        b = information_gain(post, 2.0, grid, 64, seed=77)
        assert a == b

    def test_rejects_tiny_sample_count(self):
        grid = HypothesisGrid.uniform(-2, 2, 11)
        with pytest.raises(ValueError):
            information_gain(calibrated_posterior(1.0, 0.5), 1.0, grid, 8, seed=0)


class TestTotalInformation:
    def test_two_bins(self):
        assert estimate_total_information(np.full(400, 1 / 400), 2.0, 4.0) == pytest.approx(1.0)

    def test_slope_task_width(self):
        got = estimate_total_information(np.full(401, 1 / 401), 0.1, 4.0)
        assert got == pytest.approx(math.log2(40.0), abs=1e-3)

    def test_nonuniform_prior_at_bin_resolution(self):
        assert estimate_total_information([0.5, 0.5, 0.0, 0.0], 1.0, 4.0) == pytest.approx(1.0)

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            estimate_total_information(np.full(10, 0.1), 5.0, 4.0)


class TestErrorBounds:
    def test_monte_carlo_error_value(self):
        assert monte_carlo_error(1.0, 200, 0.05) == pytest.approx(0.09603227913199208, rel=1e-9)

    def test_monte_carlo_error_vanishes(self):
        assert monte_carlo_error(1.0, 10**12, 0.05) < 1e-5

    def test_monte_carlo_error_domain(self):
        with pytest.raises(ValueError):
            monte_carlo_error(1.0, 200, 0.0)
        with pytest.raises(ValueError):
            monte_carlo_error(1.0, 200, 1.0)

    def test_surrogate_bound_exact_model(self):
        assert surrogate_error_bound(1.0, 0.0, 0.0) == 0.0

    def test_surrogate_bound_value(self):
        assert surrogate_error_bound(1.0, 0.0, 1.0) == pytest.approx(0.7213475204444817, rel=1e-9)

    def test_surrogate_bound_halves_when_denominator_doubles(self):
        one = surrogate_error_bound(1.0, 1.0, 1.0)
        two = surrogate_error_bound(2.0, 2.0, 1.0)
        assert two == pytest.approx(one / 2.0)

    def test_propagation_zero_errors(self):
        assert propagate_estimate_error(0.0, 0.0, 10.0, 2.0, 1.0) == 0.0

    def test_propagation_value(self):
        assert propagate_estimate_error(0.5, 0.1, 10.0, 2.0, 1.0) == pytest.approx(0.5)

    def test_propagation_linear_in_cost(self):
        base = propagate_estimate_error(0.3, 0.2, 8.0, 1.5, 1.0)
        assert propagate_estimate_error(0.3, 0.2, 8.0, 1.5, 7.0) == pytest.approx(7.0 * base)


class TestAPrioriEstimate:
    def test_formula_chain(self):
        task = estimation_task_for(0.5)
        report = a_priori_estimate(task, budget=100.0, seed=0)
        assert report.cost_predicted == pytest.approx(
            report.total_bits / report.step_bits * task.cost_per_action
        )
        assert report.predicted_steps == math.ceil(report.total_bits / report.step_bits)
        assert report.total_bits == pytest.approx(math.log2(40.0), abs=1e-3)

    def test_budget_below_cost_is_unsolvable(self):
        report = a_priori_estimate(estimation_task_for(1.0), budget=1.0, seed=0)
        assert report.solvable is False

    def test_generous_budget_is_solvable(self):
        report = a_priori_estimate(estimation_task_for(1.0), budget=1000.0, seed=0)
        assert report.solvable is True

    def test_steps_monotone_in_noise(self):
        steps = [
            a_priori_estimate(estimation_task_for(s), budget=math.inf, seed=0).predicted_steps
            for s in (0.1, 0.5, 1.0)
        ]
        assert steps == sorted(steps)

    def test_deterministic_given_seed(self):
        a = a_priori_estimate(estimation_task_for(0.5), budget=10.0, seed=3)
        b = a_priori_estimate(estimation_task_for(0.5), budget=10.0, seed=3)
        assert a == b

    def test_vanishing_gain_yields_sentinel(self):
        # queries confined to x ~ 0 carry almost no information about the slope
        task = EstimationTask(
            action_low=-1e-9,
            action_high=1e-9,
            noise_variance=1.0,
            kernel=RBFKernel(1.0, 4.0),
            resolution=0.1,
        )
        report = a_priori_estimate(task, budget=1e12, seed=0)
        assert report.solvable is False
        assert report.cost_predicted == INFINITE_COST

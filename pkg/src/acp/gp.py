"""1D Gaussian-process surrogate and a-priori search-cost estimation.

The estimation pipeline sizes up a task before any real query is spent:

  1. model the unknown response with a GP prior,
  2. price the initial uncertainty over the hypothesis grid in bits,
  3. estimate the information yield of each candidate action by simulating
     outcomes from the GP predictive and re-scoring the grid posterior,
  4. divide total bits by per-step bits and multiply by the cost per action.

Two error sources are tracked explicitly: Monte Carlo noise in the gain
estimates (a Hoeffding deviation bound) and surrogate mis-calibration
(a Lipschitz-in-variance bound taking the variance deviation as input).
Both are folded into a first-order margin on the predicted cost, and the
solvability verdict requires the budget to cover cost plus margin.

Hypotheses are discretized to an explicit grid, so every entropy here is a
discrete Shannon entropy in bits. GPPosterior objects are immutable; adding
an observation returns a new posterior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .info import INFINITE_COST, effective_cost

_LOG2 = math.log(2.0)
_JITTERS = (0.0, 1e-10, 1e-8, 1e-6)

#: Per-step gains below this are treated as "no progress": the task is
#: reported unsolvable instead of dividing by a vanishing estimate.
MIN_STEP_BITS = 1e-6


@dataclass(frozen=True)
class RBFKernel:
    """Squared-exponential covariance k(a, b) = s2 * exp(-(a-b)^2 / (2 l^2))."""

    lengthscale: float
    signal_variance: float

    def __post_init__(self) -> None:
        if not self.lengthscale > 0:
            raise ValueError("lengthscale must be positive")
        if not self.signal_variance > 0:
            raise ValueError("signal_variance must be positive")

    def __call__(self, a, b) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        d = a[:, None] - b[None, :]
        return self.signal_variance * np.exp(-0.5 * np.square(d / self.lengthscale))


class GPPosterior:
    """Gaussian-process state over a 1D input, conditioned on noisy points.

    The regularized Gram matrix K + noise_variance * I is factorized once at
    construction and cached; if the factorization fails numerically, an
    escalating diagonal jitter (1e-10 up to 1e-6) is tried before giving up.

    Instances are immutable: ``with_observation`` returns a new posterior.
    """

    def __init__(
        self,
        kernel: RBFKernel,
        noise_variance: float,
        observations: Sequence[tuple[float, float]] = (),
    ) -> None:
        if not noise_variance > 0:
            raise ValueError("noise_variance must be positive")
        self.kernel = kernel
        self.noise_variance = float(noise_variance)
        self.observations = tuple((float(x), float(y)) for x, y in observations)
        self._x = np.array([x for x, _ in self.observations], dtype=float)
        self._y = np.array([y for _, y in self.observations], dtype=float)
        if self.observations:
            gram = kernel(self._x, self._x)
            gram[np.diag_indices_from(gram)] += self.noise_variance
            self._factor = _factor_with_jitter(gram)
            self._alpha = cho_solve(self._factor, self._y)
        else:
            self._factor = None
            self._alpha = None

    def with_observation(self, x: float, y: float) -> "GPPosterior":
        """New posterior that additionally conditions on (x, y)."""
        return GPPosterior(self.kernel, self.noise_variance, self.observations + ((x, y),))

    def predict(self, x: float) -> tuple[float, float]:
        """Posterior mean and variance of the latent function at x.

        With no observations this is the prior: mean 0, variance equal to
        the kernel's signal variance. The variance is clipped to stay in
        (0, signal_variance] against round-off.
        """
        sig = self.kernel.signal_variance
        if not self.observations:
            return 0.0, sig
        k_star = self.kernel(np.array([x]), self._x)[0]
        mean = float(k_star @ self._alpha)
        var = sig - float(k_star @ cho_solve(self._factor, k_star))
        return mean, float(min(max(var, 1e-12), sig))

    def predictive_y(self, x: float) -> tuple[float, float]:
        """Mean and variance of a noisy observation at x (latent + noise)."""
        mean, var = self.predict(x)
        return mean, var + self.noise_variance


def _factor_with_jitter(gram: np.ndarray):
    for jitter in _JITTERS:
        try:
            g = gram if jitter == 0.0 else gram + jitter * np.eye(gram.shape[0])
            return cho_factor(g, lower=True)
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError("Gram matrix not positive definite even with jitter 1e-6")


def gaussian_channel_gain(predictive_variance: float, noise_variance: float) -> float:
    """Bits observable through a Gaussian channel: 0.5 * log2(1 + v / noise).

    Strictly increasing in the predictive variance and decreasing in the
    noise floor; 0.5 bits exactly when they match.
    """
    if not predictive_variance > 0:
        raise ValueError("predictive_variance must be positive")
    if not noise_variance > 0:
        raise ValueError("noise_variance must be positive")
    return 0.5 * math.log2(1.0 + predictive_variance / noise_variance)


def linear_response(theta: np.ndarray, action: float) -> np.ndarray:
    """Noiseless outcome theta * action of the linear task family."""
    return theta * action


@dataclass(frozen=True)
class HypothesisGrid:
    """Discrete hypothesis set: grid values, masses, and an outcome model.

    ``response(theta_values, action)`` gives the noiseless outcome of every
    hypothesis under an action; observation noise is Gaussian with the
    posterior's noise variance. The default response is the linear family.
    """

    values: np.ndarray
    probabilities: np.ndarray
    response: Callable[[np.ndarray, float], np.ndarray] = linear_response

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        probs = np.asarray(self.probabilities, dtype=float)
        if values.ndim != 1 or values.shape != probs.shape:
            raise ValueError("values and probabilities must be 1D arrays of the same length")
        if probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def uniform(cls, low: float, high: float, size: int, response=linear_response) -> "HypothesisGrid":
        if size < 2 or not high > low:
            raise ValueError("need at least two grid points over a nonempty interval")
        return cls(np.linspace(low, high, size), np.full(size, 1.0 / size), response)

    def prior_entropy(self) -> float:
        return _entropy_bits(self.probabilities)


def _entropy_bits(probs: np.ndarray) -> float:
    nz = probs[probs > 0]
    return float(-(nz * np.log2(nz)).sum())


def information_gain(
    posterior: GPPosterior,
    action: float,
    grid: HypothesisGrid,
    n_outcome_samples: int = 64,
    seed=0,
) -> float:
    """Monte Carlo estimate of the expected entropy drop from one query.

    Outcomes are sampled from the GP predictive at ``action``; for each
    sample the grid posterior is recomputed under the Gaussian observation
    model and its entropy recorded. The estimate (prior entropy minus mean
    posterior entropy) is clamped into [0, prior entropy], since sampling
    noise can push the raw value slightly outside.

    Passing the same seed for different actions reuses the same standard
    normal draws (common random numbers), which sharpens comparisons
    between actions.
    """
    if n_outcome_samples < 16:
        raise ValueError("n_outcome_samples must be at least 16")
    rng = np.random.default_rng(seed)
    prior_bits = grid.prior_entropy()
    mean_y, var_y = posterior.predictive_y(action)
    draws = mean_y + math.sqrt(var_y) * rng.standard_normal(n_outcome_samples)
    predicted = grid.response(grid.values, action)

    # zero-prior cells must stay at zero mass no matter how extreme the draw
    with np.errstate(divide="ignore"):
        log_prior = np.where(grid.probabilities > 0, np.log(grid.probabilities.clip(min=1e-300)), -np.inf)
    loglik = -np.square(draws[:, None] - predicted[None, :]) / (2.0 * posterior.noise_variance)
    logpost = loglik + log_prior[None, :]
    logpost -= logpost.max(axis=1, keepdims=True)
    post = np.exp(logpost)
    post /= post.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        contrib = np.where(post > 0, post * np.log2(np.maximum(post, 1e-300)), 0.0)
    mean_posterior_bits = float(-contrib.sum(axis=1).mean())
    gain = prior_bits - mean_posterior_bits
    return float(min(max(gain, 0.0), prior_bits))


def estimate_total_information(grid_prior, resolution: float, domain_width: float) -> float:
    """Bits needed to localize a hypothesis to ``resolution`` under the prior.

    The prior is coarsened to bins of the requested width and the entropy of
    the bin masses returned; a uniform prior gives log2(width / resolution).
    Accepts a DiscreteDistribution or any probability sequence.
    """
    if not 0 < resolution < domain_width:
        raise ValueError("resolution must lie strictly between 0 and domain_width")
    probs = np.asarray(getattr(grid_prior, "probabilities", grid_prior), dtype=float)
    n_bins = max(1, int(round(domain_width / resolution)))
    n = probs.size
    if n < n_bins:
        raise ValueError(f"prior has {n} cells, fewer than the {n_bins} requested bins")
    bin_index = (np.arange(n) * n_bins) // n
    masses = np.bincount(bin_index, weights=probs, minlength=n_bins)
    return _entropy_bits(masses)


def monte_carlo_error(gain_ceiling: float, n_samples: int, delta: float) -> float:
    """Hoeffding bound on the gain-estimate deviation, in bits.

    With per-sample gains in [0, gain_ceiling] and ``n_samples`` averaged
    samples, the estimate is within this bound of its mean with probability
    at least 1 - delta:  gain_ceiling * sqrt(ln(2/delta) / (2 n)).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie strictly in (0, 1), got {delta!r}")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if gain_ceiling < 0:
        raise ValueError("gain_ceiling must be non-negative")
    return gain_ceiling * math.sqrt(math.log(2.0 / delta) / (2.0 * n_samples))


def surrogate_error_bound(noise_variance: float, variance_floor: float, variance_deviation: float) -> float:
    """Bits of gain error caused by a predictive-variance error.

    The channel gain is Lipschitz in the predictive variance with constant
    1 / (2 (noise_variance + variance_floor)) in nats; the bound converts
    to bits. ``variance_deviation`` is the caller's bound on |true - model|
    predictive variance.
    """
    if not noise_variance > 0:
        raise ValueError("noise_variance must be positive")
    if variance_floor < 0 or variance_deviation < 0:
        raise ValueError("variance_floor and variance_deviation must be non-negative")
    return variance_deviation / (2.0 * (noise_variance + variance_floor)) / _LOG2


def propagate_estimate_error(
    total_bits_error: float,
    step_bits_error: float,
    total_bits: float,
    step_bits: float,
    step_cost: float,
) -> float:
    """First-order margin on the predicted cost given input-estimate errors.

    step_cost * (total_bits_error / step_bits
                 + total_bits * step_bits_error / step_bits^2);
    second-order terms are dropped.
    """
    if not step_bits > 0:
        raise ValueError("step_bits must be positive")
    return step_cost * (total_bits_error / step_bits + total_bits * step_bits_error / step_bits**2)


@dataclass(frozen=True)
class EstimationTask:
    """Configuration of a 1D identification task for cost estimation.

    The hypothesis lives on [theta_low, theta_high], queries on
    [action_low, action_high]; observations are response(theta, action)
    plus Gaussian noise. ``resolution`` defines when the hypothesis counts
    as identified. ``top_fraction`` controls how many of the best actions
    are averaged into the per-step gain.
    """

    theta_low: float = -2.0
    theta_high: float = 2.0
    action_low: float = -3.0
    action_high: float = 3.0
    noise_variance: float = 0.25
    kernel: RBFKernel = RBFKernel(lengthscale=1.0, signal_variance=4.0)
    resolution: float = 0.1
    cost_per_action: float = 1.0
    theta_grid_size: int = 401
    action_grid_size: int = 61
    top_fraction: float = 0.25
    n_outcome_samples: int = 64
    mc_delta: float = 0.05
    variance_deviation: float = 0.0
    variance_floor: float = 0.0
    response: Callable[[np.ndarray, float], np.ndarray] = linear_response

    def __post_init__(self) -> None:
        if not self.theta_high > self.theta_low:
            raise ValueError("theta domain is empty")
        if not self.action_high > self.action_low:
            raise ValueError("action domain is empty")
        if not self.noise_variance > 0:
            raise ValueError("noise_variance must be positive")
        if not 0 < self.resolution < (self.theta_high - self.theta_low):
            raise ValueError("resolution must be inside the theta domain width")
        if not 0 < self.top_fraction <= 1:
            raise ValueError("top_fraction must lie in (0, 1]")

    def hypothesis_grid(self) -> HypothesisGrid:
        return HypothesisGrid.uniform(self.theta_low, self.theta_high, self.theta_grid_size, self.response)

    def action_grid(self) -> np.ndarray:
        return np.linspace(self.action_low, self.action_high, self.action_grid_size)


@dataclass(frozen=True)
class EstimationReport:
    """Output of the a-priori pipeline: bits, predicted cost, and verdict."""

    total_bits: float
    step_bits: float
    cost_predicted: float
    predicted_steps: int
    mc_error_bits: float
    cost_margin: float
    solvable: bool


def a_priori_estimate(task: EstimationTask, budget: float, seed: int = 0) -> EstimationReport:
    """Predict whether the task fits the budget, before any real query.

    Per-step information is the mean estimated gain over the top
    ``task.top_fraction`` of the action grid. If that estimate is below
    MIN_STEP_BITS the task is reported unsolvable with sentinel cost
    (predicted_steps 0 marks "not applicable"). Deterministic given seed.
    """
    if not budget > 0:
        raise ValueError("budget must be positive")
    grid = task.hypothesis_grid()
    width = task.theta_high - task.theta_low
    total_bits = estimate_total_information(grid.probabilities, task.resolution, width)

    posterior = GPPosterior(task.kernel, task.noise_variance)
    actions = task.action_grid()
    gains = np.array(
        [information_gain(posterior, x, grid, task.n_outcome_samples, seed) for x in actions]
    )
    n_top = max(1, math.ceil(task.top_fraction * actions.size))
    step_bits = float(np.sort(gains)[-n_top:].mean())

    sigma_max2 = max(posterior.predict(x)[1] for x in actions)
    ceiling = gaussian_channel_gain(sigma_max2, task.noise_variance)
    mc_err = monte_carlo_error(ceiling, task.n_outcome_samples, task.mc_delta)

    if step_bits < MIN_STEP_BITS:
        return EstimationReport(
            total_bits=total_bits,
            step_bits=step_bits,
            cost_predicted=INFINITE_COST,
            predicted_steps=0,
            mc_error_bits=mc_err,
            cost_margin=INFINITE_COST,
            solvable=False,
        )

    cost = effective_cost(total_bits, step_bits, task.cost_per_action)
    step_bits_error = mc_err + surrogate_error_bound(
        task.noise_variance, task.variance_floor, task.variance_deviation
    )
    margin = propagate_estimate_error(0.0, step_bits_error, total_bits, step_bits, task.cost_per_action)
    return EstimationReport(
        total_bits=total_bits,
        step_bits=step_bits,
        cost_predicted=cost,
        predicted_steps=math.ceil(total_bits / step_bits),
        mc_error_bits=mc_err,
        cost_margin=margin,
        solvable=budget >= cost + margin,
    )

"""Sequential information-accumulation model and expected-cost bounds.

A search run is modeled as a stream of independent non-negative information
gains X_1, X_2, ... with non-increasing means mu_1 >= mu_2 >= ... >= mu_tail
> 0. The run stops at the first step where the partial sum reaches the total
requirement. With unit-cost steps the expected total cost is sandwiched by

    step_cost * total_bits / mu_1
        <= E[cost] <=
    step_cost * (total_bits / mu_tail + M2 / mu_tail**2)

where M2 bounds the second moment of every gain. The upper bound's slack is
the expected overshoot past the target, controlled by Lorden's inequality
(E[overshoot] <= M2 / mu_tail). This module simulates the process, computes
the bounds, and provides a Monte Carlo harness that checks them.

Gains are drawn by inverse-CDF transform from one uniform variate per step,
so a trial is a pure function of (spec, total_bits, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri
from scipy.stats import truncnorm

from .seeding import map_indexed, subseed

FAMILIES = ("deterministic", "exponential", "uniform", "truncated-gaussian")

#: Hard per-trial step limit guarding misconfigured specs.
STEP_CAP = 10**7


class StepCapExceeded(RuntimeError):
    """A trial failed to reach its target within the step cap."""


def _trunc_norm_stats(loc: float, scale: float, upper: float) -> tuple[float, float]:
    """(mean, second moment) of a Normal(loc, scale^2) truncated to [0, upper]."""
    a = (0.0 - loc) / scale
    b = (upper - loc) / scale
    mean, var = truncnorm.stats(a, b, loc=loc, scale=scale, moments="mv")
    return float(mean), float(var) + float(mean) ** 2


def _solve_trunc_loc(target_mean: float, scale: float, upper: float) -> float:
    """Location parameter whose [0, upper]-truncated mean equals target_mean."""
    if not 0.0 < target_mean < upper:
        raise ValueError(f"target mean {target_mean!r} must lie strictly inside (0, {upper!r})")

    def gap(loc: float) -> float:
        return _trunc_norm_stats(loc, scale, upper)[0] - target_mean

    lo, hi = target_mean - scale, target_mean + scale
    step = scale
    while gap(lo) > 0:
        step *= 2.0
        lo -= step
    step = scale
    while gap(hi) < 0:
        step *= 2.0
        hi += step
    return brentq(gap, lo, hi, xtol=1e-12)


@dataclass(frozen=True)
class GainSequenceSpec:
    """Distributional description of the per-step gains.

    ``mean_prefix`` holds the leading means explicitly; every later step
    uses ``mean_tail``. ``second_moment_bound`` is the caller's M2 >=
    sup E[X_i^2] used in the bound formulas. ``support_bound`` is the
    almost-sure upper bound M for the bounded families.

    Families and their per-step laws at mean m:
      deterministic       X = m exactly
      exponential         X ~ Exp(mean m), unbounded
      uniform             X ~ Uniform[0, 2m]  (so support_bound >= 2*mu_1)
      truncated-gaussian  X ~ Normal(loc, noise_scale^2) truncated to
                          [0, support_bound], loc solved so the truncated
                          mean is exactly m

    Prefer the factory classmethods, which fill in exact moments.
    """

    mean_prefix: tuple[float, ...]
    mean_tail: float
    family: str
    second_moment_bound: float
    support_bound: float | None = None
    noise_scale: float | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "mean_prefix", tuple(float(m) for m in self.mean_prefix))
        if not self.mean_tail > 0:
            raise ValueError("mean_tail must be positive")
        means = list(self.mean_prefix) + [self.mean_tail]
        if any(m <= 0 for m in means):
            raise ValueError("all means must be positive")
        if any(means[i] < means[i + 1] - 1e-12 for i in range(len(means) - 1)):
            raise ValueError("mean sequence must be non-increasing")
        if self.second_moment_bound < self.mean_first**2 - 1e-12:
            raise ValueError("second_moment_bound must be at least mu_1^2")
        if self.family == "uniform":
            if self.support_bound is None or self.support_bound < 2.0 * self.mean_first - 1e-12:
                raise ValueError("uniform family needs support_bound >= 2 * mu_1")
        if self.family == "truncated-gaussian":
            if self.support_bound is None or self.support_bound <= 0:
                raise ValueError("truncated-gaussian family needs a positive support_bound")
            if self.noise_scale is None or self.noise_scale <= 0:
                raise ValueError("truncated-gaussian family needs a positive noise_scale")
            if any(m >= self.support_bound for m in means):
                raise ValueError("means must lie strictly below support_bound")
            object.__setattr__(self, "_tg_locs", self._solve_tg_locs())
        if self.support_bound is not None and any(m > self.support_bound + 1e-12 for m in means):
            raise ValueError("means cannot exceed support_bound")

    # -- factories -------------------------------------------------------

    @classmethod
    def deterministic(cls, mean_prefix: Sequence[float] = (), mean_tail: float = 1.0) -> "GainSequenceSpec":
        mu1 = float(mean_prefix[0]) if len(mean_prefix) else float(mean_tail)
        return cls(tuple(mean_prefix), mean_tail, "deterministic", mu1**2, support_bound=mu1)

    @classmethod
    def exponential(cls, mean_prefix: Sequence[float] = (), mean_tail: float = 1.0) -> "GainSequenceSpec":
        mu1 = float(mean_prefix[0]) if len(mean_prefix) else float(mean_tail)
        return cls(tuple(mean_prefix), mean_tail, "exponential", 2.0 * mu1**2)

    @classmethod
    def uniform(cls, mean_prefix: Sequence[float] = (), mean_tail: float = 1.0) -> "GainSequenceSpec":
        mu1 = float(mean_prefix[0]) if len(mean_prefix) else float(mean_tail)
        return cls(tuple(mean_prefix), mean_tail, "uniform", 4.0 * mu1**2 / 3.0, support_bound=2.0 * mu1)

    @classmethod
    def truncated_gaussian(
        cls,
        mean_prefix: Sequence[float] = (),
        mean_tail: float = 1.0,
        support_bound: float = 4.0,
        noise_scale: float = 0.5,
    ) -> "GainSequenceSpec":
        means = {float(m) for m in mean_prefix} | {float(mean_tail)}
        m2 = max(
            _trunc_norm_stats(_solve_trunc_loc(m, noise_scale, support_bound), noise_scale, support_bound)[1]
            for m in means
        )
        return cls(tuple(mean_prefix), mean_tail, "truncated-gaussian", m2, support_bound, noise_scale)

    # -- structure -------------------------------------------------------

    @property
    def mean_first(self) -> float:
        """mu_1, the largest (first) expected gain."""
        return self.mean_prefix[0] if self.mean_prefix else self.mean_tail

    def means_for_steps(self, start: int, count: int) -> np.ndarray:
        """Expected gains for steps start, ..., start+count-1 (0-based)."""
        out = np.full(count, self.mean_tail)
        n_pre = len(self.mean_prefix)
        if start < n_pre:
            take = min(count, n_pre - start)
            out[:take] = self.mean_prefix[start : start + take]
        return out

    def _solve_tg_locs(self) -> dict[float, tuple[float, float, float]]:
        """mean -> (loc, cdf_at_0, cdf_at_support) for each distinct mean."""
        tables: dict[float, tuple[float, float, float]] = {}
        for m in set(self.mean_prefix) | {self.mean_tail}:
            loc = _solve_trunc_loc(m, self.noise_scale, self.support_bound)
            a = (0.0 - loc) / self.noise_scale
            b = (self.support_bound - loc) / self.noise_scale
            cdf_lo, cdf_hi = float(ndtr(a)), float(ndtr(b))
            if cdf_hi - cdf_lo < 1e-10:
                raise ValueError(
                    "truncated-gaussian family too extreme to sample reliably; "
                    "increase noise_scale or move means away from the support edges"
                )
            tables[m] = (loc, cdf_lo, cdf_hi)
        return tables

    def draw_gains(self, means: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        """Transform one uniform variate per step into a gain at the given mean."""
        if self.family == "deterministic":
            return means.copy()
        if self.family == "exponential":
            return -means * np.log1p(-uniforms)
        if self.family == "uniform":
            return 2.0 * means * uniforms
        tables: dict[float, tuple[float, float, float]] = getattr(self, "_tg_locs")
        locs = np.empty_like(means)
        cdf_lo = np.empty_like(means)
        cdf_hi = np.empty_like(means)
        for i, m in enumerate(means):
            loc, lo, hi = tables[float(m)]
            locs[i], cdf_lo[i], cdf_hi[i] = loc, lo, hi
        # clip keeps ndtri finite when a window edge underflows to 0 or 1
        quantile = np.clip(cdf_lo + uniforms * (cdf_hi - cdf_lo), 1e-16, 1.0 - 1e-16)
        return locs + self.noise_scale * ndtri(quantile)


@dataclass(frozen=True)
class StoppingTrial:
    """Outcome of one simulated run: step count, final sum, and surplus."""

    n_steps: int
    accumulated: float
    overshoot: float

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.overshoot < -1e-9:
            raise ValueError("overshoot cannot be negative")


@dataclass(frozen=True)
class BoundReport:
    """Theoretical cost bounds next to the Monte Carlo estimate they bracket."""

    lower: float
    upper: float
    empirical_mean_cost: float
    n_trials: int
    standard_error: float
    within_bounds: bool
    mean_overshoot: float

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")


def simulate_stopping(
    spec: GainSequenceSpec,
    total_bits: float,
    seed,
    step_cap: int = STEP_CAP,
) -> StoppingTrial:
    """Run one trial: draw gains until their sum first reaches total_bits.

    Deterministic given (spec, total_bits, seed); ``seed`` is anything
    ``numpy.random.default_rng`` accepts. Raises StepCapExceeded if the
    target is not reached within ``step_cap`` steps.
    """
    if not total_bits > 0:
        raise ValueError("total_bits must be positive")
    rng = np.random.default_rng(seed)
    # Fixed block schedule (a function of spec and target only) keeps the
    # consumed random stream independent of how the crossing lands.
    block = int(min(4096, max(16, math.ceil(total_bits / spec.mean_tail) + 8)))
    done = 0
    running = 0.0
    while True:
        k = min(block, step_cap - done)
        if k <= 0:
            raise StepCapExceeded(f"no crossing within {step_cap} steps (sum={running:.3g})")
        means = spec.means_for_steps(done, k)
        uniforms = None if spec.family == "deterministic" else rng.random(k)
        gains = spec.draw_gains(means, uniforms if uniforms is not None else np.empty(0))
        csum = running + np.cumsum(gains)
        idx = int(np.searchsorted(csum, total_bits, side="left"))
        if idx < k:
            accumulated = float(csum[idx])
            return StoppingTrial(done + idx + 1, accumulated, accumulated - total_bits)
        running = float(csum[-1])
        done += k


def cost_bounds(spec: GainSequenceSpec, total_bits: float, step_cost: float) -> tuple[float, float]:
    """Two-sided bound on expected total cost for the given gain process.

    Lower: step_cost * total_bits / mu_1 (best case, every step yields the
    initial expected gain). Upper: step_cost * (total_bits / mu_tail +
    M2 / mu_tail^2), the worst-case mean plus the overshoot allowance.
    """
    if not total_bits > 0:
        raise ValueError("total_bits must be positive")
    if not step_cost > 0:
        raise ValueError("step_cost must be positive")
    lower = step_cost * total_bits / spec.mean_first
    tail = spec.mean_tail
    upper = step_cost * (total_bits / tail + spec.second_moment_bound / tail**2)
    return lower, upper


def high_prob_steps(total_bits: float, min_mean_gain: float, support_bound: float, delta: float) -> int:
    """Step count sufficient to finish with probability >= 1 - delta.

    Valid for gains bounded in [0, support_bound] with per-step means at
    least ``min_mean_gain``. Returns

        ceil( T/mu + (M^2 / 2 mu^2) ln(1/delta)
              + sqrt(T M^2 ln(1/delta) / (2 mu^3)) )

    with T = total_bits, mu = min_mean_gain, M = support_bound. The ln is
    natural while information is in bits; this is consistent because the
    log factor multiplies dimensionless ratios, so the unit of T cancels
    against mu and M.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie strictly in (0, 1), got {delta!r}")
    if not total_bits > 0:
        raise ValueError("total_bits must be positive")
    if not min_mean_gain > 0:
        raise ValueError("min_mean_gain must be positive")
    if support_bound < min_mean_gain:
        raise ValueError("support_bound must be at least min_mean_gain")
    log_term = math.log(1.0 / delta)
    mu, m = min_mean_gain, support_bound
    n = (
        total_bits / mu
        + m**2 / (2.0 * mu**2) * log_term
        + math.sqrt(total_bits * m**2 * log_term / (2.0 * mu**3))
    )
    return math.ceil(n)


def _one_trial(index: int, spec: GainSequenceSpec, total_bits: float, master_seed: int) -> StoppingTrial:
    return simulate_stopping(spec, total_bits, subseed(master_seed, index))


def run_trials(
    spec: GainSequenceSpec,
    total_bits: float,
    n_trials: int,
    master_seed: int,
    workers: int = 1,
) -> list[StoppingTrial]:
    """n_trials independent trials with per-trial seeds subseed(master_seed, i)."""
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    fn = partial(_one_trial, spec=spec, total_bits=total_bits, master_seed=master_seed)
    return map_indexed(fn, n_trials, workers=workers)


def summarize_trials(
    spec: GainSequenceSpec,
    total_bits: float,
    step_cost: float,
    trials: Sequence[StoppingTrial],
) -> BoundReport:
    """Build a BoundReport from already-simulated trials.

    The report's flag allows 3 standard errors of slack above the upper
    bound; the lower bound is checked as-is since it holds in expectation
    for every spec.
    """
    n_trials = len(trials)
    if n_trials < 1:
        raise ValueError("need at least one trial")
    costs = step_cost * np.array([t.n_steps for t in trials], dtype=float)
    mean_cost = float(costs.mean())
    se = float(costs.std(ddof=1) / math.sqrt(n_trials)) if n_trials > 1 else 0.0
    lower, upper = cost_bounds(spec, total_bits, step_cost)
    overshoots = np.array([t.overshoot for t in trials])
    return BoundReport(
        lower=lower,
        upper=upper,
        empirical_mean_cost=mean_cost,
        n_trials=n_trials,
        standard_error=se,
        within_bounds=bool(lower <= mean_cost <= upper + 3.0 * se),
        mean_overshoot=float(overshoots.mean()),
    )


def validate_bounds(
    spec: GainSequenceSpec,
    total_bits: float,
    step_cost: float,
    n_trials: int,
    master_seed: int,
    workers: int = 1,
) -> BoundReport:
    """Monte Carlo check that the empirical mean cost sits inside the bounds."""
    if n_trials < 100:
        raise ValueError("n_trials must be at least 100")
    trials = run_trials(spec, total_bits, n_trials, master_seed, workers=workers)
    return summarize_trials(spec, total_bits, step_cost, trials)


def completion_fraction(
    spec: GainSequenceSpec,
    total_bits: float,
    max_steps: int,
    n_trials: int,
    master_seed: int,
    workers: int = 1,
) -> float:
    """Fraction of trials whose stopping time is at most max_steps."""
    trials = run_trials(spec, total_bits, n_trials, master_seed, workers=workers)
    return sum(t.n_steps <= max_steps for t in trials) / n_trials

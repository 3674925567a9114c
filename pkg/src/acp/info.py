"""Entropy primitives and the core budget-feasibility formulas.

All information quantities are in bits (log base 2). Problems that cannot
be solved at any budget are represented by the ``INFINITE_COST`` sentinel,
which propagates through cost arithmetic instead of raising.

Everything here is a pure function over immutable values and is safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: Sentinel cost of an unsolvable problem. Never solvable at any budget.
INFINITE_COST = math.inf

_PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class CostModel:
    """Per-action cost and total budget, in abstract resource units."""

    cost_per_action: float
    budget: float

    def __post_init__(self) -> None:
        if not self.cost_per_action > 0:
            raise ValueError("cost_per_action must be positive")
        if not self.budget > 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class DiscreteDistribution:
    """Explicit probability vector over a finite outcome set."""

    probabilities: tuple[float, ...]

    def __init__(self, probabilities: Sequence[float]) -> None:
        probs = tuple(float(p) for p in probabilities)
        if not probs:
            raise ValueError("distribution needs at least one outcome")
        if min(probs) < 0.0:
            raise ValueError("probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "probabilities", probs)

    def __len__(self) -> int:
        return len(self.probabilities)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probabilities, dtype=float)


def binary_entropy(p: float) -> float:
    """Entropy in bits of a Bernoulli(p) indicator, with 0*log(0) := 0.

    Maximal (1 bit) at p = 1/2, zero at the degenerate endpoints.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    q = 1.0 - p
    return -p * math.log2(p) - q * math.log2(q)


def entropy(dist: DiscreteDistribution) -> float:
    """Shannon entropy of a discrete distribution, in bits.

    Bounded by log2(len(dist)), with equality iff uniform.
    """
    p = dist.as_array()
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def search_information(p_goal: float) -> float:
    """Self-information -log2(p) of hitting a goal region of mass p.

    This is the "bits needed to find a needle" reading of the total
    information requirement: rare goals cost more bits. A goal of
    measure zero returns ``INFINITE_COST``.
    """
    if not 0.0 <= p_goal <= 1.0:
        raise ValueError(f"p_goal must lie in [0, 1], got {p_goal!r}")
    if p_goal == 0.0:
        return INFINITE_COST
    return -math.log2(p_goal)


def effective_cost(total_bits: float, bits_per_step: float, step_cost: float) -> float:
    """Predicted expenditure (total_bits / bits_per_step) * step_cost.

    An infinite total requirement yields ``INFINITE_COST``. Zero or
    negative per-step information is an error: it means the estimate
    offers no path to a solution and callers should treat the problem
    as unsolvable rather than divide by it.
    """
    if not bits_per_step > 0:
        raise ValueError("bits_per_step must be positive (no information per step)")
    if not step_cost > 0:
        raise ValueError("step_cost must be positive")
    if total_bits < 0:
        raise ValueError("total_bits must be non-negative")
    if math.isinf(total_bits):
        return INFINITE_COST
    return (total_bits / bits_per_step) * step_cost


def select_action(candidates: Sequence[tuple[float, float]]) -> int:
    """Index of the (gain, cost) pair with the best gain/cost ratio.

    Ties break to the smallest index so repeated runs are reproducible.
    """
    if len(candidates) == 0:
        raise ValueError("candidates must be non-empty")
    best_idx = 0
    best_ratio = -math.inf
    for idx, (gain, cost) in enumerate(candidates):
        if not cost > 0:
            raise ValueError(f"candidate {idx}: cost must be positive")
        ratio = gain / cost
        if ratio > best_ratio:
            best_idx = idx
            best_ratio = ratio
    return best_idx


def solvability_verdict(cost: float, budget: float) -> bool:
    """True iff the budget covers the effective cost (boundary included)."""
    if not budget > 0:
        raise ValueError("budget must be positive")
    if math.isinf(cost):
        return False
    return budget >= cost

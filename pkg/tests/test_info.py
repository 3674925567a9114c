"""Entropy primitives and cost/verdict formulas."""

import math

import numpy as np
import pytest

from acp import (
    INFINITE_COST,
    CostModel,
    DiscreteDistribution,
    binary_entropy,
    effective_cost,
    entropy,
    search_information,
    select_action,
    solvability_verdict,
)


class TestBinaryEntropy:
    def test_symmetry_maximum(self):
        assert binary_entropy(0.5) == 1.0

    def test_degenerate_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_direct_formula_value(self):
        # -p log2 p - (1-p) log2 (1-p) at p = 0.11
        assert binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-3)

    def test_symmetric_in_p(self):
        rng = np.random.default_rng(42)
        for p in rng.uniform(0, 1, 200):
            assert binary_entropy(p) == pytest.approx(binary_entropy(1.0 - p), abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            binary_entropy(-0.01)
        with pytest.raises(ValueError):
            binary_entropy(1.01)


class TestEntropy:
    def test_uniform_two_outcomes(self):
        assert entropy(DiscreteDistribution([0.5, 0.5])) == pytest.approx(1.0)

    def test_uniform_power_of_two(self):
        for k in (1, 3, 5):
            n = 2**k
            dist = DiscreteDistribution([1.0 / n] * n)
            assert entropy(dist) == pytest.approx(float(k), abs=1e-9)

    def test_dyadic(self):
        assert entropy(DiscreteDistribution([0.5, 0.25, 0.25])) == pytest.approx(1.5)

    def test_bounded_by_log_size_equality_iff_uniform(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(2, 40))
            p = rng.dirichlet(np.ones(n))
            h = entropy(DiscreteDistribution(p))
            assert h <= math.log2(n) + 1e-9
        assert entropy(DiscreteDistribution(np.full(16, 1 / 16))) == pytest.approx(4.0)
        assert entropy(DiscreteDistribution([0.7, 0.3])) < 1.0

    def test_invalid_distribution(self):
        with pytest.raises(ValueError):
            DiscreteDistribution([0.5, 0.4])
        with pytest.raises(ValueError):
            DiscreteDistribution([1.2, -0.2])
        with pytest.raises(ValueError):
            DiscreteDistribution([])


class TestSearchInformation:
    def test_goal_everywhere(self):
        assert search_information(1.0) == 0.0

    def test_power_of_two(self):
        assert search_information(0.125) == pytest.approx(3.0)

    def test_zero_mass_gives_sentinel(self):
        assert search_information(0.0) == INFINITE_COST

    def test_domain_error(self):
        with pytest.raises(ValueError):
            search_information(1.5)


class TestEffectiveCost:
    def test_formula(self):
        assert effective_cost(10.0, 2.0, 3.0) == pytest.approx(15.0)

    def test_one_step_identity(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x = float(rng.uniform(0.1, 50))
            c = float(rng.uniform(0.1, 9))
            assert effective_cost(x, x, c) == pytest.approx(c)

    def test_sentinel_propagates(self):
        assert effective_cost(INFINITE_COST, 1.0, 1.0) == INFINITE_COST

    def test_scaling_laws(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            tot, per, cost = rng.uniform(0.1, 20, 3)
            a = float(rng.uniform(0.5, 4))
            base = effective_cost(tot, per, cost)
            assert effective_cost(a * tot, per, cost) == pytest.approx(a * base)
            assert effective_cost(tot, per, a * cost) == pytest.approx(a * base)
            assert effective_cost(tot, a * per, cost) == pytest.approx(base / a)

    def test_zero_per_step_is_error(self):
        with pytest.raises(ValueError):
            effective_cost(10.0, 0.0, 1.0)


class TestSelectAction:
    def test_best_ratio(self):
        assert select_action([(2, 1), (4, 4)]) == 0

    def test_tie_breaks_to_first(self):
        assert select_action([(1, 1), (2, 2)]) == 0

    def test_singleton(self):
        assert select_action([(0.5, 5)]) == 0

    def test_cost_scaling_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(1, 12))
            gains = rng.uniform(0, 5, n)
            costs = rng.uniform(0.1, 5, n)
            picked = select_action(list(zip(gains, costs)))
            scale = float(rng.uniform(0.1, 10))
            assert select_action(list(zip(gains, costs * scale))) == picked

    def test_empty_is_error(self):
        with pytest.raises(ValueError):
            select_action([])


class TestSolvability:
    def test_under_budget(self):
        assert solvability_verdict(15.0, 20.0) is True

    def test_boundary_included(self):
        assert solvability_verdict(15.0, 15.0) is True

    def test_sentinel_never_solvable(self):
        assert solvability_verdict(INFINITE_COST, 1e18) is False

    def test_over_budget(self):
        assert solvability_verdict(21.0, 20.0) is False


class TestCostModel:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            CostModel(cost_per_action=0.0, budget=1.0)
        with pytest.raises(ValueError):
            CostModel(cost_per_action=1.0, budget=-1.0)

    def test_holds_values(self):
        m = CostModel(cost_per_action=2.0, budget=30.0)
        assert solvability_verdict(effective_cost(10.0, 1.0, m.cost_per_action), m.budget)

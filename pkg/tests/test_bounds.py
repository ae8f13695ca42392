import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_model
from elgfreq.bounds import (
    BASELINE,
    IMPROVED,
    NotDominantError,
    bound_constant,
    buyhold_gap_bounds,
    improved_gap_bounds,
    market_portfolio,
    rebalance_horizon,
    sublinear_ratio_sequence,
)
from elgfreq.elg import MONTE_CARLO, elg_exact, find_dominant
from elgfreq.model import ModelError, ReturnModel
from oracles import brute_elg, brute_ratio


class TestBaseline:
    def test_full_weight_is_zero(self):
        for n in (1, 7, 100):
            b = buyhold_gap_bounds(1.0, n)
            assert (b.lower, b.upper) == (0.0, 0.0)

    def test_half_weight_ten_steps(self):
        b = buyhold_gap_bounds(0.5, 10)
        assert b.kind == BASELINE
        assert b.lower == pytest.approx(-0.030685281944005473, abs=1e-15)
        assert b.upper == pytest.approx(0.06931471805599453, abs=1e-15)
        assert b.lower_tight == 0.0

    def test_market_portfolio_weight(self):
        m, eps = 4, 0.2
        K = market_portfolio(m, favored=0, epsilon=eps)
        assert K.sum() == pytest.approx(1.0)
        b = buyhold_gap_bounds(K[2], 5)
        assert b.upper == pytest.approx(math.log((m - 1) / eps) / 5, rel=1e-14)
        assert b.lower == pytest.approx((math.log((m - 1) / eps) + 1 - (m - 1) / eps) / 5, rel=1e-14)

    @pytest.mark.parametrize("k_j, n", [(0.0, 1), (1.5, 1), (0.5, 0)])
    def test_preconditions(self, k_j, n):
        with pytest.raises(ValueError):
            buyhold_gap_bounds(k_j, n)

    @given(st.floats(1e-6, 1.0), st.integers(1, 10**6))
    def test_ordering_and_decay(self, k_j, n):
        b = buyhold_gap_bounds(k_j, n)
        assert b.lower <= b.upper
        C = bound_constant(k_j)
        assert abs(b.lower) <= C / n * (1 + 1e-12)
        assert abs(b.upper) <= C / n * (1 + 1e-12)


def _dominant_models(count, seed):
    rng = np.random.default_rng(seed)
    found = []
    while len(found) < count:
        model = random_model(rng)
        j = find_dominant(model).dominant_index
        if j is not None:
            found.append((model, j))
    return found


def _weights_with(m, j, k_j, rng):
    rest = rng.dirichlet(np.ones(m - 1)) * (1 - k_j)
    return np.insert(rest, j, k_j)


def test_sandwich_on_random_dominant_models():
    rng = np.random.default_rng(1)
    for model, j in _dominant_models(8, seed=4):
        g1 = float(model.probabilities @ np.log1p(model.atoms[:, j]))
        for k_j in (0.2, 0.6, 0.95):
            K = _weights_with(model.m, j, k_j, rng)
            for n in range(1, 5):
                gap = g1 - elg_exact(model, K, n).value
                base = buyhold_gap_bounds(k_j, n)
                imp = improved_gap_bounds(model, K, j, n)
                assert base.lower - 1e-9 <= gap <= base.upper + 1e-9
                assert -1e-12 <= gap <= imp.upper + 1e-12
                assert 0.0 <= imp.upper <= base.upper + 1e-12


class TestImproved:
    def test_full_weight(self, two_atom):
        b = improved_gap_bounds(two_atom, [0.0, 1.0], 1, 3)
        assert b.kind == IMPROVED
        assert b.upper == pytest.approx(0.0, abs=1e-15)

    def test_two_atom_quarter_cash(self, two_atom):
        K = [0.25, 0.75]
        b = improved_gap_bounds(two_atom, K, 1, 2)
        # E[R_j / K^T R] from the brute-force oracle
        ratio = brute_ratio(two_atom.atoms, two_atom.probabilities, K, 1, 2)
        assert ratio == pytest.approx(1.0162622574920166, abs=1e-14)
        assert b.upper == pytest.approx((math.log(1 / 0.75) - 1 + 0.75 * ratio) / 2, abs=1e-14)
        assert b.upper <= 0.5 * math.log(1 / 0.75)
        gap = brute_elg(two_atom.atoms, two_atom.probabilities, [0, 1], 1) - \
            brute_elg(two_atom.atoms, two_atom.probabilities, K, 2)
        assert 0 <= gap <= b.upper

    def test_rejects_non_dominant(self, two_atom, no_dominant):
        with pytest.raises(NotDominantError):
            improved_gap_bounds(two_atom, [0.5, 0.5], 0, 2)
        with pytest.raises(NotDominantError):
            improved_gap_bounds(no_dominant, [0.5, 0.5], 1, 2)

    def test_rejects_zero_weight(self, two_atom):
        with pytest.raises(ModelError):
            improved_gap_bounds(two_atom, [1.0, 0.0], 1, 2)

    def test_monte_carlo_fallback(self, two_atom):
        K = [0.4, 0.6]
        exact = improved_gap_bounds(two_atom, K, 1, 6)
        mc = improved_gap_bounds(two_atom, K, 1, 6, budget=10, samples=200_000, seed=3)
        assert mc.method == MONTE_CARLO
        assert abs(mc.upper - exact.upper) <= 4 * mc.std_error


def test_squared_term_sign_in_log_inequality():
    # log(1/k) >= 1 - k + (1 - k)^2 / 2 holds on (0, 1); with (1 + k)^2 / 2 it fails near 1
    k = np.linspace(1e-6, 1 - 1e-6, 10001)
    assert np.all(np.log(1 / k) >= 1 - k + (1 - k) ** 2 / 2 - 1e-15)
    assert math.log(1 / 0.99) < 1 - 0.99 + (1 + 0.99) ** 2 / 2


class TestHorizon:
    def test_half(self):
        assert rebalance_horizon(0.5, 0.07).n_star == 10

    def test_ninety(self):
        assert rebalance_horizon(0.9, 0.01).n_star == 11

    @pytest.mark.parametrize("k_j, eps", [(0.5, math.log(2)), (0.5, 0.0), (0.5, 1.0), (1.0, 0.1), (0.0, 0.1)])
    def test_preconditions(self, k_j, eps):
        with pytest.raises(ValueError):
            rebalance_horizon(k_j, eps)

    @given(st.floats(0.01, 0.99), st.floats(0.001, 0.999))
    def test_formula(self, k_j, frac):
        eps = frac * math.log(1 / k_j)
        plan = rebalance_horizon(k_j, eps)
        assert plan.n_star == math.ceil(math.log(1 / k_j) / eps)
        assert buyhold_gap_bounds(k_j, plan.n_star).upper <= eps * (1 + 1e-12)

    def test_contract_on_dominant_model(self, two_atom):
        g1 = float(two_atom.probabilities @ np.log1p(two_atom.atoms[:, 1]))
        for k_j in (0.3, 0.7):
            eps = 0.25 * math.log(1 / k_j)
            plan = rebalance_horizon(k_j, eps)
            for n in range(plan.n_star, plan.n_star + 4):
                gap = g1 - elg_exact(two_atom, [1 - k_j, k_j], n).value
                assert 0 <= gap <= eps


class TestSublinear:
    def test_first_ratios(self):
        assert sublinear_ratio_sequence(0.3, 3) == pytest.approx([1 / 2, 2 / 3], abs=1e-15)

    def test_monotone_below_one(self):
        r = sublinear_ratio_sequence(0.7, 200)
        assert all(a < b for a, b in zip(r, r[1:]))
        assert all(x < 1 for x in r)

    def test_last_ratio(self):
        assert sublinear_ratio_sequence(0.5, 1000)[-1] == pytest.approx(0.999, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            sublinear_ratio_sequence(1.0, 5)
        with pytest.raises(ValueError):
            sublinear_ratio_sequence(0.5, 1)


def test_dominant_model_with_three_assets_and_cash():
    model = ReturnModel(["cash", "x", "y"],
                        [[0.0, 0.3, 0.1], [0.0, -0.05, 0.2], [0.0, 0.1, -0.1]], [0.3, 0.3, 0.4], 0)
    j = find_dominant(model).dominant_index
    assert j is not None
    K = market_portfolio(3, favored=(j + 1) % 3, epsilon=0.3)
    g1 = float(model.probabilities @ np.log1p(model.atoms[:, j]))
    for n in range(1, 6):
        gap = g1 - elg_exact(model, K, n).value
        assert buyhold_gap_bounds(K[j], n).contains(gap, 1e-12)
        assert gap <= improved_gap_bounds(model, K, j, n).upper + 1e-12

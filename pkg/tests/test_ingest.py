import math

import numpy as np
import pytest

from elgfreq.elg import EXACT, MONTE_CARLO, elg_exact
from elgfreq.ingest import (
    TickDataError,
    TickFormatError,
    TickSeries,
    empirical_gap_curve,
    empirical_model,
    load_ticks,
    realized_compound,
    realized_returns,
    sliding_dominance,
    synthetic_ticks,
    write_ticks,
)


def _write(tmp_path, text):
    path = tmp_path / "ticks.csv"
    path.write_text(text)
    return path


class TestLoad:
    def test_two_rows_without_header(self, tmp_path):
        t = load_ticks(_write(tmp_path, "0.0,100.0\n0.1,100.5\n"))
        assert t.tick_count == 2
        assert realized_returns(t)[0] == pytest.approx(0.005, abs=1e-12)

    def test_header_and_blank_lines(self, tmp_path):
        t = load_ticks(_write(tmp_path, "timestamp,price\n0,10\n\n1,11\n1,11\n"))
        assert t.prices.tolist() == [10.0, 11.0, 11.0]
        assert realized_returns(t)[1] == 0.0

    def test_zero_price_reports_line(self, tmp_path):
        with pytest.raises(TickDataError, match="line 3"):
            load_ticks(_write(tmp_path, "timestamp,price\n0,10\n1,0\n"))

    def test_decreasing_timestamp(self, tmp_path):
        with pytest.raises(TickDataError, match="line 2"):
            load_ticks(_write(tmp_path, "5,10\n4,11\n"))

    @pytest.mark.parametrize("text", ["0,10\n1,abc\n", "0,10,3\n"])
    def test_malformed_rows(self, tmp_path, text):
        with pytest.raises(TickFormatError, match="line"):
            load_ticks(_write(tmp_path, text))

    def test_round_trip_is_exact(self, tmp_path):
        ticks = synthetic_ticks(500, seed=4)
        write_ticks(ticks, tmp_path / "t.csv")
        back = load_ticks(tmp_path / "t.csv")
        assert np.array_equal(back.prices, ticks.prices)
        assert np.array_equal(back.timestamps, ticks.timestamps)


def test_realized_returns_need_two_ticks():
    with pytest.raises(ValueError):
        realized_returns(TickSeries([0.0], [1.0]))


class TestCompound:
    def test_unit_block_is_identity(self):
        x = np.array([0.1, -0.2, 0.05])
        assert np.array_equal(realized_compound(x, 1), x)

    def test_two_block(self):
        assert realized_compound([0.1, 0.1], 2) == pytest.approx([0.21], abs=1e-15)

    def test_partial_block_dropped(self):
        assert realized_compound([0.1, 0.1, 0.5], 2).size == 1

    def test_random_against_loop(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-0.01, 0.01, 103)
        got = realized_compound(x, 5)
        ref = [math.prod(1 + v for v in x[i:i + 5]) - 1 for i in range(0, 100, 5)]
        np.testing.assert_allclose(got, ref, rtol=0, atol=1e-15)


class TestSlidingDominance:
    def test_zero_returns(self):
        d = sliding_dominance(np.zeros(50), 0.0, 10)
        assert np.all(d.asset_ratio == 1.0) and np.all(d.cash_ratio == 1.0)
        assert d.asset_dominant.all() and d.cash_dominant.all()

    def test_constant_return(self):
        x = np.full(30, 0.01)
        d = sliding_dominance(x, 0.0, 7)
        np.testing.assert_allclose(d.asset_ratio, 1 / 1.01, rtol=1e-14)
        np.testing.assert_allclose(d.cash_ratio, 1.01, rtol=1e-14)
        assert d.fractions() == {"asset": 1.0, "cash": 0.0, "neither": 0.0}

    def test_matches_recomputation(self):
        rng = np.random.default_rng(2)
        x = rng.normal(0, 1e-3, 400)
        r, M = 1e-5, 37
        d = sliding_dominance(x, r, M)
        assert d.start_index == M - 1
        assert d.asset_ratio.size == x.size - M + 1
        for i, k in enumerate(d.index):
            w = x[k - M + 1:k + 1]
            assert abs(d.asset_ratio[i] - np.mean((1 + r) / (1 + w))) <= 1e-12
            assert abs(d.cash_ratio[i] - np.mean((1 + w) / (1 + r))) <= 1e-12

    def test_single_tick_window_product_is_one(self):
        x = np.array([0.02, -0.01, 0.03])
        d = sliding_dominance(x, 0.001, 1)
        np.testing.assert_allclose(d.asset_ratio * d.cash_ratio, 1.0, rtol=1e-15)

    def test_window_longer_than_series(self):
        with pytest.raises(ValueError):
            sliding_dominance(np.zeros(5), 0.0, 6)

    def test_rows(self):
        rows = sliding_dominance(np.array([0.0, 0.1, -0.1]), 0.0, 2).rows()
        assert [r["k"] for r in rows] == [1, 2]
        assert rows[0]["asset_dominant"] == 1


class TestEmpiricalModel:
    def test_structure(self):
        x = np.array([0.01, -0.02, 0.0, 0.03])
        model = empirical_model(x, r=1e-4)
        assert model.m == 2 and model.s == 4
        assert model.riskless_index == 0
        assert np.all(model.atoms[:, 0] == 1e-4)
        assert model.probabilities.tolist() == [0.25] * 4

    def test_mean_preserved(self):
        x = synthetic_ticks(1001, seed=5)
        r = realized_returns(x)
        model = empirical_model(r)
        assert model.mean_returns()[1] == pytest.approx(r.mean(), rel=1e-12)

    def test_synthetic_drift_is_exact(self):
        ticks = synthetic_ticks(2000, log_mean=2e-6, log_vol=1e-4, seed=9)
        lr = np.diff(np.log(ticks.prices))
        assert lr.mean() == pytest.approx(2e-6, abs=1e-15)
        assert lr.std() == pytest.approx(1e-4, rel=1e-9)


class TestGapCurve:
    def test_full_stock_weight_has_zero_gap(self):
        x = realized_returns(synthetic_ticks(200, seed=1))
        rows = empirical_gap_curve(x, 0.0, [0.0, 1.0], [1, 2, 3])
        for row in rows:
            assert row.gap == pytest.approx(0.0, abs=1e-15)
            assert row.method == EXACT

    def test_exact_rows_respect_bounds(self):
        x = realized_returns(synthetic_ticks(150, seed=2))
        model = empirical_model(x)
        rows = empirical_gap_curve(x, 0.0, [0.5, 0.5], [1, 2, 3], model=model)
        for row in rows:
            assert row.baseline_upper is not None
            assert row.g_n == pytest.approx(elg_exact(model, [0.5, 0.5], row.n).value, abs=1e-15)
            assert -1e-15 <= row.gap <= row.improved_upper + 1e-15
            assert row.improved_upper <= row.baseline_upper
            assert row.realized_gap is not None

    def test_monte_carlo_rows(self):
        x = realized_returns(synthetic_ticks(1000, seed=3))
        rows = empirical_gap_curve(x, 0.0, [0.25, 0.75], [1, 5], samples=5000, budget=10**6)
        assert [r.method for r in rows] == [EXACT, MONTE_CARLO]
        mc = rows[1]
        assert mc.std_error < 1e-9
        assert mc.gap <= mc.baseline_upper

    def test_non_dominant_stock_has_no_bounds(self):
        ticks = synthetic_ticks(300, log_mean=-1e-5, seed=0)
        x = realized_returns(ticks)
        row = empirical_gap_curve(x, 0.0, [0.5, 0.5], [1])[0]
        assert row.baseline_upper is None and row.improved_upper is None

    def test_zero_stock_weight_rejected(self):
        with pytest.raises(ValueError):
            empirical_gap_curve(np.zeros(5), 0.0, [1.0, 0.0], [1])

import math

import numpy as np
import pytest

from coxclaims import (
    ClaimRecord,
    ClaimSet,
    ConfigError,
    DegenerateDelay,
    ExponentialDelay,
    ModelSpec,
    PreconditionError,
    classify,
    discretize,
    simulate,
    simulate_batch,
    thinned_scales,
)
from coxclaims.validation import ks_uniform


def make_spec(**overrides):
    base = dict(
        gamma=[[0.9, 0.1], [0.2, 0.8]],
        pi1=[1.0, 0.0],
        shapes=[1, 3],
        theta=0.5,
        grid=[0.0, 1.0, 2.0, 3.0],
        exposures=[1.0, 1.0, 1.0],
    )
    base.update(overrides)
    return ModelSpec(**base)


class TestSimulate:
    def test_negligible_intensity_no_claims(self):
        spec = make_spec(theta=1e-12)
        claims = simulate(spec, ExponentialDelay(rate=1.0), 3, np.random.default_rng(0))
        assert len(claims) == 0

    def test_single_state_mean_count(self):
        # plain mixed Poisson: E[N] = m * theta per unit period
        spec = make_spec(
            gamma=[[1.0]], pi1=[1.0], shapes=[1], theta=1.0,
            grid=[0.0, 1.0], exposures=[1.0],
        )
        batch = simulate_batch(
            spec, DegenerateDelay(value=0.0), 1, 200_000, np.random.default_rng(7)
        )
        counts = batch.counts[:, 0]
        se = counts.std(ddof=1) / math.sqrt(counts.size)
        assert abs(counts.mean() - 1.0) < 4 * se

    def test_arrivals_sorted_and_in_horizon(self):
        spec = make_spec(theta=2.0)
        claims = simulate(spec, ExponentialDelay(rate=1.0), 3, np.random.default_rng(3))
        arrivals = [r.arrival for r in claims.records]
        assert arrivals == sorted(arrivals)
        assert all(0.0 <= a < 3.0 for a in arrivals)
        assert all(r.delay >= 0.0 for r in claims.records)
        for r in claims.records:
            lo, hi, _, _ = spec.interval(r.period)
            assert lo <= r.arrival < hi

    def test_epochs_uniform_within_period(self):
        spec = make_spec(theta=2.0, exposures=[1.0, 3.0, 0.5])
        batch = simulate_batch(
            spec, ExponentialDelay(rate=1.0), 3, 120_000, np.random.default_rng(11)
        )
        for period in (1, 2, 3):
            lo, hi, _, _ = spec.interval(period)
            epochs = batch.arrivals[batch.period_index == period]
            assert epochs.size > 100_000
            report = ks_uniform(epochs, lo, hi)
            assert report.passed

    def test_same_seed_identical_claims(self, ref_spec, ref_delay):
        a = simulate(ref_spec, ref_delay, 3, np.random.default_rng(42))
        b = simulate(ref_spec, ref_delay, 3, np.random.default_rng(42))
        assert a.to_csv() == b.to_csv()
        assert a.records == b.records

    def test_bad_arguments(self, ref_spec, ref_delay):
        with pytest.raises(ConfigError):
            simulate_batch(ref_spec, ref_delay, 0, 10, np.random.default_rng(0))
        with pytest.raises(ConfigError):
            simulate_batch(ref_spec, ref_delay, 2, 0, np.random.default_rng(0))

    def test_csv_shape(self, ref_spec, ref_delay):
        claims = simulate(ref_spec, ref_delay, 3, np.random.default_rng(1))
        lines = claims.to_csv().strip().splitlines()
        assert lines[0] == "arrival,delay,report_time,period"
        assert len(lines) == len(claims) + 1


class TestClassify:
    def _toy_claims(self):
        records = (
            ClaimRecord(arrival=0.5, delay=0.2, period=1),   # reports at 0.7
            ClaimRecord(arrival=0.9, delay=5.0, period=1),   # reports at 5.9
            ClaimRecord(arrival=1.5, delay=0.5, period=2),   # reports at 2.0
        )
        return ClaimSet(records=records, horizon=2, grid=np.array([0.0, 1.0, 2.0]))

    def test_split_at_valuation(self):
        reported, ibnr = classify(self._toy_claims(), 2.0)
        assert [r.arrival for r in reported.records] == [0.5, 1.5]
        assert [r.arrival for r in ibnr.records] == [0.9]

    def test_boundary_report_counts_as_reported(self):
        reported, _ = classify(self._toy_claims(), 2.0)
        assert any(r.report_time == 2.0 for r in reported.records)

    def test_arrivals_after_valuation_dropped(self):
        reported, ibnr = classify(self._toy_claims(), 1.0)
        assert len(reported) + len(ibnr) == 2

    def test_reported_fraction_matches_thinned_scale(self):
        spec = make_spec(
            gamma=[[1.0]], pi1=[1.0], shapes=[1], theta=1.0,
            grid=[0.0, 1.0], exposures=[1.0],
        )
        delay = ExponentialDelay(rate=1.0)
        sc = thinned_scales(spec, delay, 1.0)
        frac_expected = sc.reported[0] / spec.period_scale(1)
        rng = np.random.default_rng(19)
        batch = simulate_batch(spec, delay, 1, 100_000, rng)
        reported = np.sum(batch.arrivals + batch.delays <= 1.0)
        n = batch.arrivals.size
        se = math.sqrt(frac_expected * (1 - frac_expected) / n)
        assert abs(reported / n - frac_expected) < 4 * se


class TestDiscretize:
    def test_single_long_delay_claim(self):
        records = (ClaimRecord(arrival=0.5, delay=10.0, period=1),)
        claims = ClaimSet(records=records, horizon=2, grid=np.array([0.0, 1.0, 2.0]))
        out = discretize(claims, 2.0)
        np.testing.assert_array_equal(out["total"], [1, 0])
        np.testing.assert_array_equal(out["reported"], [0, 0])
        np.testing.assert_array_equal(out["ibnr"], [1, 0])

    def test_conservation(self, ref_spec, ref_delay):
        for seed in range(5):
            claims = simulate(ref_spec, ref_delay, 3, np.random.default_rng(seed))
            out = discretize(claims, 3.0)
            np.testing.assert_array_equal(out["total"], out["reported"] + out["ibnr"])
            assert out["total"].sum() == len(claims)

    def test_off_grid_valuation_rejected(self, ref_spec, ref_delay):
        claims = simulate(ref_spec, ref_delay, 3, np.random.default_rng(0))
        with pytest.raises(PreconditionError, match="grid"):
            discretize(claims, 1.5)

    def test_early_valuation_truncates(self, ref_spec, ref_delay):
        claims = simulate(ref_spec, ref_delay, 3, np.random.default_rng(4))
        out = discretize(claims, 2.0)
        assert out["total"].size == 2
        expected = sum(1 for r in claims.records if r.arrival < 2.0)
        assert out["total"].sum() == expected

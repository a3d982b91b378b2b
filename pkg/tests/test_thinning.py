import math

import numpy as np
import pytest
from scipy import integrate

from coxclaims import (
    DegenerateDelay,
    EmpiricalDelay,
    ExponentialDelay,
    ModelSpec,
    PreconditionError,
    UniformDelay,
    WeibullDelay,
    ibnr_mark_density,
    reported_mark_density,
    thinned_scales,
)


def make_spec(grid, exposures, theta=0.5):
    return ModelSpec(
        gamma=[[0.9, 0.1], [0.2, 0.8]],
        pi1=[1.0, 0.0],
        shapes=[1, 3],
        theta=theta,
        grid=grid,
        exposures=exposures,
    )


class TestThinnedScales:
    def test_instant_reporting_everything_reported(self, ref_spec):
        sc = thinned_scales(ref_spec, DegenerateDelay(value=0.0), 3.0)
        for j in range(1, 4):
            assert sc.reported[j - 1] == pytest.approx(ref_spec.period_scale(j), abs=1e-15)
        np.testing.assert_allclose(sc.ibnr, 0.0, atol=1e-15)

    def test_delay_beyond_valuation_nothing_reported(self, ref_spec):
        sc = thinned_scales(ref_spec, DegenerateDelay(value=6.0), 3.0)
        np.testing.assert_allclose(sc.reported, 0.0, atol=1e-15)

    def test_exponential_closed_form_vs_quadrature(self):
        spec = make_spec([0.0, 1.0, 2.0], [1.0, 1.0], theta=1.0)
        sc = thinned_scales(spec, ExponentialDelay(rate=1.0), 2.0)
        # theta_1^r = 1 - e^-1 (1 - e^-1), from the antiderivative of 1 - e^-(tau-t)
        assert sc.reported[0] == pytest.approx(1.0 - math.exp(-1) * (1 - math.exp(-1)), rel=1e-12)
        quad, _ = integrate.quad(lambda t: 1.0 - math.exp(-(2.0 - t)), 0.0, 1.0)
        assert sc.reported[0] == pytest.approx(quad, abs=1e-10)

    def test_off_grid_valuation_rejected(self, ref_spec, ref_delay):
        with pytest.raises(Exception, match="grid"):
            thinned_scales(ref_spec, ref_delay, 2.5)

    @pytest.mark.parametrize(
        "delay",
        [
            DegenerateDelay(value=0.4),
            ExponentialDelay(rate=2.2),
            UniformDelay(upper=1.3),
            WeibullDelay(shape=0.8, scale=1.1),
            EmpiricalDelay(knots=(0.0, 0.2, 2.5), cdf_values=(0.1, 0.6, 1.0)),
        ],
    )
    def test_conservation_randomized_grids(self, delay):
        rng = np.random.default_rng(99)
        for _ in range(10):
            k = int(rng.integers(1, 5))
            widths = rng.uniform(0.2, 2.0, size=k)
            grid = np.concatenate([[0.0], np.cumsum(widths)])
            exposures = rng.uniform(0.5, 3.0, size=k)
            theta = float(rng.uniform(0.1, 2.0))
            spec = make_spec(grid, exposures, theta=theta)
            sc = thinned_scales(spec, delay, float(grid[-1]))
            for j in range(1, k + 1):
                total = (grid[j] - grid[j - 1]) * exposures[j - 1] * theta
                assert sc.reported[j - 1] + sc.ibnr[j - 1] == pytest.approx(total, abs=1e-10)


class TestMarkDensities:
    def test_reported_point_mass_at_zero(self):
        d = DegenerateDelay(value=0.0)
        assert math.isinf(reported_mark_density(d, 2.0, 2.0, 0.0))
        assert reported_mark_density(d, 2.0, 2.0, 0.5) == 0.0

    def test_reported_exponential_at_origin(self):
        d = ExponentialDelay(rate=1.0)
        tau, t = 3.0, 3.0 - math.log(2)
        assert reported_mark_density(d, t, tau, 0.0) == pytest.approx(2.0, rel=1e-12)

    def test_reported_normalizes(self):
        d = WeibullDelay(shape=1.5, scale=1.0)
        tau, t = 3.0, 1.2
        val, _ = integrate.quad(lambda u: reported_mark_density(d, t, tau, u), 0, tau - t)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_ibnr_memoryless_boundary(self):
        mu = 1.7
        d = ExponentialDelay(rate=mu)
        tau, t = 2.0, 0.5
        assert ibnr_mark_density(d, t, tau, tau - t) == pytest.approx(mu, rel=1e-12)

    def test_ibnr_all_reported_is_error(self):
        d = UniformDelay(upper=1.0)
        with pytest.raises(PreconditionError):
            ibnr_mark_density(d, 0.0, 2.0, 1.5)

    def test_reported_no_mass_is_error(self):
        d = DegenerateDelay(value=5.0)
        with pytest.raises(PreconditionError):
            reported_mark_density(d, 1.9, 2.0, 0.05)

    def test_ibnr_normalizes(self):
        d = ExponentialDelay(rate=0.9)
        tau, t = 2.0, 0.7
        val, _ = integrate.quad(lambda u: ibnr_mark_density(d, t, tau, u), tau - t, 60)
        assert val == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize(
        "delay",
        [
            ExponentialDelay(rate=1.4),
            UniformDelay(upper=3.0),
            WeibullDelay(shape=2.0, scale=1.2),
        ],
    )
    def test_mixture_identity(self, delay):
        tau = 2.0
        rng = np.random.default_rng(5)
        for _ in range(25):
            t = float(rng.uniform(0.0, tau - 0.05))
            u = float(rng.uniform(0.0, 4.0))
            p = delay.cdf(tau - t)
            if not 0.0 < p < 1.0:
                continue
            mixed = p * reported_mark_density(delay, t, tau, u) + (1 - p) * ibnr_mark_density(
                delay, t, tau, u
            )
            assert abs(mixed - delay.pdf(u)) < 1e-10

"""Reporting-delay distributions.

Each family exposes the pointwise CDF, the density where one exists,
seeded sampling, and the integrated CDF functional

    integrated_cdf(d, a, b, tau) = int_a^b P_U(tau - t) dt

needed by the thinned intensity scale parameters. Closed forms are used
for the degenerate/exponential/uniform families and the piecewise-linear
empirical CDF; adaptive quadrature (abs. tolerance 1e-10) otherwise.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigError, PreconditionError

QUAD_ABS_TOL = 1e-10


class DelayModel:
    """Base class: nonnegative delay U with CDF P_U."""

    family = "abstract"

    def cdf(self, u: float) -> float:
        raise NotImplementedError

    def pdf(self, u: float) -> float:
        raise NotImplementedError

    def sample(self, rng, size=None):
        raise NotImplementedError

    def cdf_antiderivative(self, x: float) -> float:
        """I(x) = int_0^x P_U(s) ds for x >= 0; quadrature fallback."""
        if x <= 0.0:
            return 0.0
        value, _ = integrate.quad(self.cdf, 0.0, x, epsabs=QUAD_ABS_TOL, limit=200)
        return value

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class DegenerateDelay(DelayModel):
    """All delays equal the constant ``value``."""

    value: float
    family = "degenerate"

    def __post_init__(self):
        if self.value < 0:
            raise ConfigError("degenerate delay value must be >= 0")

    def cdf(self, u):
        return 1.0 if u >= self.value else 0.0

    def pdf(self, u):
        # point mass: no density; represented as an atom of infinite height
        return math.inf if u == self.value else 0.0

    def sample(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def cdf_antiderivative(self, x):
        return max(0.0, x - self.value)

    def to_dict(self):
        return {"family": "degenerate", "params": {"value": self.value}}


@dataclass(frozen=True)
class ExponentialDelay(DelayModel):
    """Exponential delay with the given rate."""

    rate: float
    family = "exponential"

    def __post_init__(self):
        if self.rate <= 0:
            raise ConfigError("exponential delay rate must be > 0")

    def cdf(self, u):
        return 1.0 - math.exp(-self.rate * u) if u > 0 else 0.0

    def pdf(self, u):
        return self.rate * math.exp(-self.rate * u) if u >= 0 else 0.0

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def cdf_antiderivative(self, x):
        if x <= 0.0:
            return 0.0
        return x - (1.0 - math.exp(-self.rate * x)) / self.rate

    def to_dict(self):
        return {"family": "exponential", "params": {"rate": self.rate}}


@dataclass(frozen=True)
class UniformDelay(DelayModel):
    """Uniform delay on [0, upper]."""

    upper: float
    family = "uniform"

    def __post_init__(self):
        if self.upper <= 0:
            raise ConfigError("uniform delay upper bound must be > 0")

    def cdf(self, u):
        if u <= 0:
            return 0.0
        return min(u / self.upper, 1.0)

    def pdf(self, u):
        return 1.0 / self.upper if 0 <= u <= self.upper else 0.0

    def sample(self, rng, size=None):
        return rng.uniform(0.0, self.upper, size=size)

    def cdf_antiderivative(self, x):
        if x <= 0.0:
            return 0.0
        if x <= self.upper:
            return x * x / (2.0 * self.upper)
        return x - self.upper / 2.0

    def to_dict(self):
        return {"family": "uniform", "params": {"upper": self.upper}}


@dataclass(frozen=True)
class WeibullDelay(DelayModel):
    """Weibull delay; CDF 1 - exp(-(u/scale)^shape)."""

    shape: float
    scale: float
    family = "weibull"

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ConfigError("weibull delay shape and scale must be > 0")

    def cdf(self, u):
        if u <= 0:
            return 0.0
        return 1.0 - math.exp(-((u / self.scale) ** self.shape))

    def pdf(self, u):
        if u < 0:
            return 0.0
        if u == 0:
            if self.shape < 1:
                return math.inf
            return 1.0 / self.scale if self.shape == 1 else 0.0
        z = u / self.scale
        return (self.shape / self.scale) * z ** (self.shape - 1) * math.exp(-(z**self.shape))

    def sample(self, rng, size=None):
        return self.scale * rng.weibull(self.shape, size=size)

    def to_dict(self):
        return {"family": "weibull", "params": {"shape": self.shape, "scale": self.scale}}


@dataclass(frozen=True)
class EmpiricalDelay(DelayModel):
    """Piecewise-linear CDF interpolating (knot, cdf) pairs.

    The CDF is 0 before the first knot and must reach 1 at the last knot.
    Between knots it is linear, so the integrated CDF is exact piecewise
    quadratic (no quadrature needed).
    """

    knots: tuple
    cdf_values: tuple
    family = "empirical"

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        vals = np.asarray(self.cdf_values, dtype=float)
        if knots.ndim != 1 or knots.shape != vals.shape or knots.size < 2:
            raise ConfigError("empirical delay needs matching knot/cdf vectors, length >= 2")
        if np.any(np.diff(knots) <= 0):
            raise ConfigError("empirical delay knots must be strictly increasing")
        if knots[0] < 0:
            raise ConfigError("empirical delay knots must be nonnegative")
        if np.any(vals < 0) or np.any(vals > 1) or np.any(np.diff(vals) < 0):
            raise ConfigError("empirical delay cdf values must be nondecreasing in [0, 1]")
        if abs(vals[-1] - 1.0) > 1e-12:
            raise ConfigError("empirical delay cdf must reach 1 at the last knot")
        object.__setattr__(self, "knots", tuple(knots))
        object.__setattr__(self, "cdf_values", tuple(vals))

    def _arrays(self):
        return np.asarray(self.knots), np.asarray(self.cdf_values)

    def cdf(self, u):
        knots, vals = self._arrays()
        if u < knots[0]:
            return 0.0
        if u >= knots[-1]:
            return 1.0
        return float(np.interp(u, knots, vals))

    def pdf(self, u):
        knots, vals = self._arrays()
        if u < knots[0] or u >= knots[-1]:
            return 0.0
        j = int(np.searchsorted(knots, u, side="right")) - 1
        return float((vals[j + 1] - vals[j]) / (knots[j + 1] - knots[j]))

    def sample(self, rng, size=None):
        knots, vals = self._arrays()
        u = rng.random(size=size)
        return np.interp(u, vals, knots) if size is not None else float(np.interp(u, vals, knots))

    def cdf_antiderivative(self, x):
        knots, vals = self._arrays()
        if x <= knots[0]:
            return 0.0
        total = 0.0
        prev_t, prev_c = knots[0], vals[0]
        for t, c in zip(knots[1:], vals[1:]):
            if x <= t:
                # linear segment from (prev_t, prev_c) to (t, c)
                frac = (x - prev_t) / (t - prev_t) if t > prev_t else 0.0
                cx = prev_c + frac * (c - prev_c)
                total += 0.5 * (prev_c + cx) * (x - prev_t)
                return total
            total += 0.5 * (prev_c + c) * (t - prev_t)
            prev_t, prev_c = t, c
        total += 1.0 * (x - prev_t)
        return total

    def to_dict(self):
        return {
            "family": "empirical",
            "params": {"knots": list(self.knots), "cdf": list(self.cdf_values)},
        }


def integrated_cdf(delay: DelayModel, a: float, b: float, tau: float) -> float:
    """int_a^b P_U(tau - t) dt, via the antiderivative I(x) = int_0^x P_U.

    Substituting s = tau - t gives I(tau - a) - I(tau - b). The value lies
    in [0, b - a].
    """
    if a < 0 or a > b or b > tau:
        raise PreconditionError(
            f"integrated_cdf requires 0 <= a <= b <= tau, got a={a}, b={b}, tau={tau}"
        )
    if a == b:
        return 0.0
    value = delay.cdf_antiderivative(tau - a) - delay.cdf_antiderivative(tau - b)
    return min(max(value, 0.0), b - a)


_FAMILIES = {
    "degenerate": lambda p: DegenerateDelay(value=float(p["value"])),
    "exponential": lambda p: ExponentialDelay(rate=float(p["rate"])),
    "uniform": lambda p: UniformDelay(upper=float(p["upper"])),
    "weibull": lambda p: WeibullDelay(shape=float(p["shape"]), scale=float(p["scale"])),
    "empirical": lambda p: EmpiricalDelay(knots=tuple(p["knots"]), cdf_values=tuple(p["cdf"])),
}


def delay_from_dict(data: dict) -> DelayModel:
    """Build a DelayModel from ``{"family": ..., "params": {...}}``."""
    try:
        family = data["family"]
        params = data.get("params", {})
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"delay spec must have 'family' and 'params' keys: {exc}")
    if family not in _FAMILIES:
        raise ConfigError(
            f"unknown delay family '{family}'; expected one of {sorted(_FAMILIES)}"
        )
    try:
        return _FAMILIES[family](params)
    except KeyError as exc:
        raise ConfigError(f"delay family '{family}' missing parameter {exc}")

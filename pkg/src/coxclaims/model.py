"""Erlang-HMM piecewise stochastic intensity.

A hidden Markov chain C_1, C_2, ... selects per-period intensity levels:
given C_l = i, the level for period l is Erlang with integer shape
``shapes[i]`` and scale ``exposures[l] * theta``. Periods are 1-based.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .delays import DelayModel, delay_from_dict
from .errors import ConfigError, PreconditionError
from .markov import check_distribution, check_transition_matrix, k_step

GRID_REL_TOL = 1e-9


@dataclass(frozen=True)
class ModelSpec:
    """Full parameterization of the claim-arrival intensity model.

    Attributes
    ----------
    gamma : (g, g) transition matrix of the hidden chain
    pi1 : length-g initial state distribution
    shapes : length-g positive integer Erlang shapes
    theta : base scale (claims per unit exposure-time)
    grid : period boundaries d_0 = 0 < d_1 < ... < d_K
    exposures : positive exposures, one per grid interval
    """

    gamma: np.ndarray
    pi1: np.ndarray
    shapes: np.ndarray
    theta: float
    grid: np.ndarray
    exposures: np.ndarray

    def __post_init__(self):
        gamma = check_transition_matrix(self.gamma)
        pi1 = check_distribution(self.pi1)
        shapes = np.asarray(self.shapes)
        if shapes.ndim != 1 or np.any(shapes < 1) or np.any(shapes != np.floor(shapes)):
            raise ConfigError("shapes must be positive integers")
        shapes = shapes.astype(int)
        g = gamma.shape[0]
        if pi1.shape[0] != g or shapes.shape[0] != g:
            raise ConfigError(
                f"dimension mismatch: gamma is {g}x{g}, pi1 has {pi1.shape[0]}, "
                f"shapes has {shapes.shape[0]}"
            )
        if self.theta <= 0:
            raise ConfigError(f"theta must be > 0, got {self.theta}")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("grid must be strictly increasing from d_0 = 0")
        exposures = np.asarray(self.exposures, dtype=float)
        if exposures.shape[0] != grid.size - 1 or np.any(exposures <= 0):
            raise ConfigError("exposures must be positive, one per grid interval")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "pi1", pi1)
        object.__setattr__(self, "shapes", shapes)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "exposures", exposures)

    @property
    def g(self) -> int:
        return self.gamma.shape[0]

    @property
    def n_periods(self) -> int:
        """Number of periods covered by the stored grid."""
        return self.grid.size - 1

    def interval(self, l: int):
        """(d_{l-1}, d_l, omega_l, extended) for 1-based period l.

        Requests beyond the stored grid extend it with the last interval
        width and last exposure; ``extended`` flags that.
        """
        if l < 1:
            raise ConfigError(f"period index must be >= 1, got {l}")
        if l <= self.n_periods:
            return self.grid[l - 1], self.grid[l], self.exposures[l - 1], False
        width = self.grid[-1] - self.grid[-2]
        extra = l - self.n_periods
        d_end = self.grid[-1]
        return (
            d_end + (extra - 1) * width,
            d_end + extra * width,
            self.exposures[-1],
            True,
        )

    def erlang_scale(self, l: int) -> float:
        """Scale omega_l * theta of the state-dependent Erlang level."""
        _, _, omega, _ = self.interval(l)
        return omega * self.theta

    def period_scale(self, l: int) -> float:
        """Pascal scale (d_l - d_{l-1}) * omega_l * theta for period l counts."""
        lo, hi, omega, _ = self.interval(l)
        return (hi - lo) * omega * self.theta

    def pi_l(self, l: int) -> np.ndarray:
        """State distribution at period l: pi_1 @ gamma**(l-1)."""
        if l < 1:
            raise ConfigError(f"period index must be >= 1, got {l}")
        return self.pi1 @ k_step(self.gamma, l - 1)

    def grid_index(self, tau: float) -> int:
        """Index k with tau = d_k, within relative tolerance 1e-9 of d_K."""
        tol = GRID_REL_TOL * max(self.grid[-1], 1.0)
        hits = np.nonzero(np.abs(self.grid - tau) <= tol)[0]
        if hits.size == 0:
            raise PreconditionError(f"valuation date {tau} is not a grid point")
        return int(hits[0])

    def to_dict(self, delay: DelayModel | None = None) -> dict:
        data = {
            "g": self.g,
            "gamma": [float(x) for x in self.gamma.ravel()],
            "pi1": [float(x) for x in self.pi1],
            "shapes": [int(m) for m in self.shapes],
            "theta": self.theta,
            "grid": [float(d) for d in self.grid],
            "exposures": [float(w) for w in self.exposures],
        }
        if delay is not None:
            data["delay"] = delay.to_dict()
        return data


def spec_from_dict(data: dict) -> ModelSpec:
    """Build a ModelSpec from the JSON document schema.

    Keys: ``g``, ``gamma`` (row-major, flat or nested), ``pi1``, ``shapes``,
    ``theta``, ``grid``, ``exposures``.
    """
    try:
        g = int(data["g"])
        gamma = np.asarray(data["gamma"], dtype=float)
        if gamma.ndim == 1:
            if gamma.size != g * g:
                raise ConfigError(f"gamma has {gamma.size} entries, expected g*g = {g * g}")
            gamma = gamma.reshape(g, g)
        return ModelSpec(
            gamma=gamma,
            pi1=np.asarray(data["pi1"], dtype=float),
            shapes=np.asarray(data["shapes"]),
            theta=float(data["theta"]),
            grid=np.asarray(data["grid"], dtype=float),
            exposures=np.asarray(data["exposures"], dtype=float),
        )
    except KeyError as exc:
        raise ConfigError(f"model spec missing key {exc}")


def load_config(path: str):
    """Load a run config JSON file.

    Returns (spec, delay, extras) where extras holds ``valuation`` and
    ``seed`` if present.
    """
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
    spec = spec_from_dict(data)
    delay = delay_from_dict(data["delay"]) if "delay" in data else None
    extras = {k: data[k] for k in ("valuation", "seed") if k in data}
    return spec, delay, extras


def state_dependent_density(spec: ModelSpec, l: int, i: int, lam: float) -> float:
    """Erlang density f(lam; m_i, omega_l * theta) of the level in state i.

    ``i`` is 1-based.
    """
    if not 1 <= i <= spec.g:
        raise ConfigError(f"state {i} out of range 1..{spec.g}")
    if lam < 0:
        raise ConfigError(f"intensity level must be >= 0, got {lam}")
    m = int(spec.shapes[i - 1])
    scale = spec.erlang_scale(l)
    if lam == 0.0:
        return 1.0 / scale if m == 1 else 0.0
    logpdf = (m - 1) * math.log(lam) - lam / scale - m * math.log(scale) - math.lgamma(m)
    return math.exp(logpdf)


def lambda_marginal_density(spec: ModelSpec, l: int, lam: float) -> float:
    """Marginal density of the period-l level: Erlang mixture with weights pi_l."""
    weights = spec.pi_l(l)
    return float(
        sum(w * state_dependent_density(spec, l, i + 1, lam) for i, w in enumerate(weights))
    )


@dataclass(frozen=True)
class IntensityPath:
    """One realized (state, level) trajectory; states are 1-based."""

    states: np.ndarray
    intensities: np.ndarray
    horizon: int
    extended: bool = field(default=False)


def _sample_erlang(rng, m: int, scale: float) -> float:
    # sum of m exponential draws: exact for integer shapes
    return float(rng.exponential(scale, size=m).sum())


def sample_path(spec: ModelSpec, k: int, rng) -> IntensityPath:
    """Sample C_1..C_k from the chain and the Erlang levels on top.

    Reproducible given the generator state; horizons beyond the stored
    grid reuse the last exposure (flagged via ``extended``).
    """
    if k < 1:
        raise ConfigError(f"horizon must be >= 1, got {k}")
    states = np.empty(k, dtype=int)
    levels = np.empty(k, dtype=float)
    cum_pi = np.cumsum(spec.pi1)
    cum_rows = np.cumsum(spec.gamma, axis=1)
    state = int(np.searchsorted(cum_pi, rng.random(), side="right"))
    extended = False
    for l in range(1, k + 1):
        if l > 1:
            state = int(np.searchsorted(cum_rows[state], rng.random(), side="right"))
        state = min(state, spec.g - 1)
        _, _, _, ext = spec.interval(l)
        extended = extended or ext
        states[l - 1] = state + 1
        levels[l - 1] = _sample_erlang(rng, int(spec.shapes[state]), spec.erlang_scale(l))
    return IntensityPath(states=states, intensities=levels, horizon=k, extended=extended)

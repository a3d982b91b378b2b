"""Exact simulation of the marked claim-arrival process.

Per period: draw the hidden state and intensity level, then a Poisson
count, then scatter the epochs i.i.d. uniform over the period and attach
i.i.d. delays (count-then-scatter, justified by the conditional order
statistics property; exact for piecewise-constant intensities).
"""

from dataclasses import dataclass

import numpy as np

from .delays import DelayModel
from .errors import ConfigError, PreconditionError
from .model import ModelSpec

CSV_HEADER = "arrival,delay,report_time,period"


@dataclass(frozen=True)
class ClaimRecord:
    """One marked point: arrival epoch, reporting delay, 1-based period."""

    arrival: float
    delay: float
    period: int

    @property
    def report_time(self) -> float:
        return self.arrival + self.delay


@dataclass(frozen=True)
class ClaimSet:
    """Arrival-ordered claims generated on [0, d_k)."""

    records: tuple
    horizon: int
    grid: np.ndarray

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(
            f"{r.arrival:.12g},{r.delay:.12g},{r.report_time:.12g},{r.period}"
            for r in self.records
        )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BatchClaims:
    """Vectorized output of many independent replications.

    ``counts`` is (replications, k); the flat arrays list every claim with
    its replication and 1-based period index.
    """

    counts: np.ndarray
    rep_index: np.ndarray
    period_index: np.ndarray
    arrivals: np.ndarray
    delays: np.ndarray
    replications: int
    horizon: int


def _sample_states(spec: ModelSpec, k: int, replications: int, rng) -> np.ndarray:
    """(replications, k) array of 0-based hidden states."""
    states = np.empty((replications, k), dtype=np.int64)
    cum_pi = np.cumsum(spec.pi1)
    cum_rows = np.cumsum(spec.gamma, axis=1)
    states[:, 0] = np.searchsorted(cum_pi, rng.random(replications), side="right")
    np.clip(states[:, 0], 0, spec.g - 1, out=states[:, 0])
    u = rng.random((replications, k))
    for l in range(1, k):
        rows = cum_rows[states[:, l - 1]]
        states[:, l] = (u[:, l, None] > rows).sum(axis=1)
        np.clip(states[:, l], 0, spec.g - 1, out=states[:, l])
    return states


def _sample_levels(spec: ModelSpec, states: np.ndarray, rng) -> np.ndarray:
    """Erlang levels given states, as masked sums of exponential draws."""
    replications, k = states.shape
    max_m = int(spec.shapes.max())
    draws = rng.exponential(size=(replications, k, max_m))
    shapes = spec.shapes[states]
    mask = np.arange(max_m)[None, None, :] < shapes[:, :, None]
    scales = np.array([spec.erlang_scale(l) for l in range(1, k + 1)])
    return (draws * mask).sum(axis=2) * scales[None, :]


def simulate_batch(
    spec: ModelSpec, delay: DelayModel, k: int, replications: int, rng
) -> BatchClaims:
    """Simulate many replications of the marked process on [0, d_k)."""
    if k < 1:
        raise ConfigError(f"horizon must be >= 1, got {k}")
    if replications < 1:
        raise ConfigError(f"replications must be >= 1, got {replications}")
    states = _sample_states(spec, k, replications, rng)
    levels = _sample_levels(spec, states, rng)
    bounds = np.array([spec.interval(l)[:2] for l in range(1, k + 1)])
    widths = bounds[:, 1] - bounds[:, 0]
    counts = rng.poisson(levels * widths[None, :])
    total = int(counts.sum())
    flat = counts.ravel()
    cell_rep, cell_period = np.divmod(np.arange(flat.size), k)
    rep_index = np.repeat(cell_rep, flat)
    period_cell = np.repeat(cell_period, flat)
    arrivals = bounds[period_cell, 0] + widths[period_cell] * rng.random(total)
    delays = np.asarray(delay.sample(rng, size=total), dtype=float)
    return BatchClaims(
        counts=counts,
        rep_index=rep_index,
        period_index=period_cell + 1,
        arrivals=arrivals,
        delays=delays,
        replications=replications,
        horizon=k,
    )


def simulate(spec: ModelSpec, delay: DelayModel, k: int, rng) -> ClaimSet:
    """Simulate one replication and return arrival-ordered claim records.

    Deterministic given the generator state; floating-point arrival ties
    keep their generation order (stable sort).
    """
    batch = simulate_batch(spec, delay, k, replications=1, rng=rng)
    order = np.argsort(batch.arrivals, kind="stable")
    records = tuple(
        ClaimRecord(
            arrival=float(batch.arrivals[i]),
            delay=float(batch.delays[i]),
            period=int(batch.period_index[i]),
        )
        for i in order
    )
    grid = np.array([spec.interval(l)[0] for l in range(1, k + 1)] + [spec.interval(k)[1]])
    return ClaimSet(records=records, horizon=k, grid=grid)


def classify(claims: ClaimSet, tau: float):
    """Partition arrivals before tau into reported (T + U <= tau) and IBNR."""
    if tau < 0:
        raise PreconditionError(f"valuation date must be >= 0, got {tau}")
    reported = tuple(
        r for r in claims.records if r.arrival < tau and r.report_time <= tau
    )
    ibnr = tuple(r for r in claims.records if r.arrival < tau and r.report_time > tau)
    return (
        ClaimSet(records=reported, horizon=claims.horizon, grid=claims.grid),
        ClaimSet(records=ibnr, horizon=claims.horizon, grid=claims.grid),
    )


def discretize(claims: ClaimSet, tau: float):
    """Per-period count vectors (total, reported, IBNR) up to tau = d_k.

    tau must sit on the claim set's grid (relative tolerance 1e-9).
    """
    grid = claims.grid
    tol = 1e-9 * max(grid[-1], 1.0)
    hits = np.nonzero(np.abs(grid - tau) <= tol)[0]
    if hits.size == 0 or hits[0] == 0:
        raise PreconditionError(f"valuation date {tau} is not a grid point")
    k = int(hits[0])
    total = np.zeros(k, dtype=int)
    reported = np.zeros(k, dtype=int)
    ibnr = np.zeros(k, dtype=int)
    for r in claims.records:
        if r.arrival >= tau or r.period > k:
            continue
        total[r.period - 1] += 1
        if r.report_time <= tau:
            reported[r.period - 1] += 1
        else:
            ibnr[r.period - 1] += 1
    return {"total": total, "reported": reported, "ibnr": ibnr}

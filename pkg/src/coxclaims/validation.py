"""Independent oracles: Monte Carlo estimators, brute-force hidden-path
enumeration, and KS uniformity tests.

These deliberately avoid the optimized code paths they are used to check
(the path enumeration shares only the Pascal pmf kernel with the forward
algorithm).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .delays import DelayModel
from .errors import ConfigError, PreconditionError
from .model import ModelSpec
from .pascal import pascal_pmf
from .simulate import simulate_batch

MAX_BRUTE_FORCE_PATHS = 1_000_000


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    replications: int


@dataclass(frozen=True)
class KsReport:
    statistic: float
    n: int
    critical_1pct: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_1pct


@dataclass(frozen=True)
class McCountPmf:
    """Empirical pmf of a total count with per-bin binomial standard errors."""

    pmf: np.ndarray
    std_errors: np.ndarray
    replications: int

    @property
    def n_max(self) -> int:
        return self.pmf.size - 1


def mc_count_pmf(
    spec: ModelSpec,
    delay: DelayModel,
    tau: float,
    which: str,
    replications: int,
    rng,
    n_max: int | None = None,
) -> McCountPmf:
    """Monte Carlo estimate of the total reported/IBNR count distribution."""
    if which not in ("reported", "ibnr", "total"):
        raise ConfigError(f"which must be 'reported', 'ibnr' or 'total', got '{which}'")
    if replications < 1000:
        raise ConfigError(f"need at least 1000 replications, got {replications}")
    k = spec.grid_index(tau)
    if k < 1:
        raise PreconditionError("valuation date must be at or after d_1")
    batch = simulate_batch(spec, delay, k, replications, rng)
    if which == "total":
        totals = batch.counts.sum(axis=1)
    else:
        reported_mask = batch.arrivals + batch.delays <= tau
        keep = reported_mask if which == "reported" else ~reported_mask
        totals = np.bincount(
            batch.rep_index[keep], minlength=batch.replications
        )
    top = int(totals.max()) if n_max is None else int(n_max)
    freq = np.bincount(totals[totals <= top], minlength=top + 1).astype(float)
    pmf = freq / replications
    se = np.sqrt(pmf * (1.0 - pmf) / replications)
    return McCountPmf(pmf=pmf, std_errors=se, replications=replications)


def brute_force_joint(spec: ModelSpec, counts, scales=None, periods=None) -> float:
    """Literal g^k hidden-path sum of the joint count pmf.

    Reference implementation kept deliberately unoptimized; refuses when
    g^k exceeds 10^6.
    """
    counts = [int(n) for n in counts]
    k = len(counts)
    if periods is None:
        periods = list(range(1, k + 1))
    if scales is None:
        scales = [spec.period_scale(l) for l in periods]
    if spec.g**k > MAX_BRUTE_FORCE_PATHS:
        raise PreconditionError(
            f"brute force refuses g^k = {spec.g}^{k} > {MAX_BRUTE_FORCE_PATHS} paths"
        )
    pi_first = spec.pi_l(periods[0])
    steps = [
        np.linalg.matrix_power(spec.gamma, b - a) for a, b in zip(periods, periods[1:])
    ]
    total = 0.0
    for path in itertools.product(range(spec.g), repeat=k):
        beta = pi_first[path[0]]
        for j in range(k - 1):
            beta *= steps[j][path[j], path[j + 1]]
        prod = beta
        for n, i, theta_j in zip(counts, path, scales):
            prod *= pascal_pmf(n, int(spec.shapes[i]), theta_j)
        total += prod
    return float(total)


def ks_uniform(samples, a: float, b: float) -> KsReport:
    """One-sample KS statistic against Uniform(a, b).

    The 1% critical value uses the asymptotic formula 1.63 / sqrt(n),
    accurate for the sample sizes (>= 10^4) used in acceptance tests.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 10:
        raise ConfigError(f"need at least 10 samples for the KS test, got {n}")
    if b <= a:
        raise ConfigError("interval must satisfy a < b")
    x = np.sort((samples - a) / (b - a))
    grid = np.arange(1, n + 1) / n
    stat = float(max(np.max(grid - x), np.max(x - (grid - 1.0 / n))))
    return KsReport(statistic=stat, n=n, critical_1pct=1.63 / np.sqrt(n))

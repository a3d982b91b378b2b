"""Discrete-distribution analytics for the hidden-Markov count process.

Pascal (negative binomial) pmf kernel, mixed-Pascal marginals, joint
pmfs by forward matrix products, stationary covariance/ACF, common-scale
re-expression of multivariate Pascal mixtures, and aggregation to the
law of the total reported/IBNR count.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .delays import DelayModel
from .errors import AccuracyError, ConfigError, PreconditionError
from .markov import k_step, spectral_decompose, stationary_distribution
from .model import ModelSpec
from .thinning import thinned_scales

# exact integer binomial below this, log-gamma beyond
_EXACT_PMF_LIMIT = 300
_STATIONARITY_TOL = 1e-10


def pascal_pmf(n: int, m: int, theta: float) -> float:
    """p(n; m, theta) = C(n+m-1, m-1) (1/(1+theta))^m (theta/(1+theta))^n.

    theta = 0 degenerates to a point mass at n = 0.
    """
    if n < 0:
        raise ConfigError(f"count must be >= 0, got {n}")
    if m < 1 or m != int(m):
        raise ConfigError(f"shape must be a positive integer, got {m}")
    if theta < 0:
        raise ConfigError(f"scale must be >= 0, got {theta}")
    n, m = int(n), int(m)
    if theta == 0.0:
        return 1.0 if n == 0 else 0.0
    if n + m <= _EXACT_PMF_LIMIT:
        return math.comb(n + m - 1, m - 1) * (1.0 / (1.0 + theta)) ** m * (
            theta / (1.0 + theta)
        ) ** n
    log_p = (
        math.lgamma(n + m)
        - math.lgamma(m)
        - math.lgamma(n + 1)
        - m * math.log1p(theta)
        + n * (math.log(theta) - math.log1p(theta))
    )
    return math.exp(log_p)


def pascal_sf(n: int, m: int, theta: float) -> float:
    """Tail mass P(N > n) of the Pascal(m, theta) law."""
    if theta == 0.0:
        return 0.0
    return float(stats.nbinom.sf(n, m, 1.0 / (1.0 + theta)))


def _pascal_pmf_vec(ns: np.ndarray, m: int, theta: float) -> np.ndarray:
    # same algebra as pascal_pmf, vectorized over counts
    if theta == 0.0:
        return (ns == 0).astype(float)
    log_p = (
        special.gammaln(ns + m)
        - special.gammaln(m)
        - special.gammaln(ns + 1)
        - m * np.log1p(theta)
        + ns * (np.log(theta) - np.log1p(theta))
    )
    return np.exp(log_p)


def marginal_pmf(spec: ModelSpec, l: int, n: int) -> float:
    """P(N_l = n): mixed Pascal with weights pi_l and the period-l scale."""
    weights = spec.pi_l(l)
    scale = spec.period_scale(l)
    return float(
        sum(w * pascal_pmf(n, int(m), scale) for w, m in zip(weights, spec.shapes))
    )


def _resolve_periods_scales(spec, counts, scales, periods):
    counts = [int(n) for n in counts]
    if any(n < 0 for n in counts):
        raise ConfigError("counts must be nonnegative")
    k = len(counts)
    if periods is None:
        periods = list(range(1, k + 1))
    else:
        periods = [int(l) for l in periods]
        if len(periods) != k:
            raise ConfigError("periods and counts must have equal length")
        if any(l < 1 for l in periods) or any(b <= a for a, b in zip(periods, periods[1:])):
            raise ConfigError("periods must be strictly increasing and >= 1")
    if scales is None:
        scales = [spec.period_scale(l) for l in periods]
    else:
        scales = [float(s) for s in scales]
        if len(scales) != k:
            raise ConfigError("scales and counts must have equal length")
        if any(s < 0 for s in scales):
            raise ConfigError("scales must be nonnegative")
    return counts, scales, periods


def joint_pmf(spec: ModelSpec, counts, scales=None, periods=None) -> float:
    """Joint pmf of the counts over the given periods.

    Computed as the forward product pi_{l_1} D_1 G_1 D_2 G_2 ... D_k 1^T,
    where D_j = diag(p(n_j; m_i, theta_j)) and G_j is the (l_{j+1} - l_j)-step
    transition matrix; O(k g^2) instead of the g^k path sum. Periods default
    to 1..k (consecutive); scales default to the unthinned period scales.
    """
    counts, scales, periods = _resolve_periods_scales(spec, counts, scales, periods)
    vec = spec.pi_l(periods[0]).copy()
    for j, (n, theta_j) in enumerate(zip(counts, scales)):
        emit = np.array([pascal_pmf(n, int(m), theta_j) for m in spec.shapes])
        vec = vec * emit
        if j + 1 < len(counts):
            vec = vec @ k_step(spec.gamma, periods[j + 1] - periods[j])
    return float(vec.sum())


def _check_stationarity_grid(spec: ModelSpec):
    for l in range(1, spec.n_periods + 1):
        lo, hi, omega, _ = spec.interval(l)
        if abs((hi - lo) * omega - 1.0) > _STATIONARITY_TOL:
            raise PreconditionError(
                f"stationarity requires (d_l - d_(l-1)) * omega_l = 1; "
                f"period {l} has {(hi - lo) * omega:.15g}"
            )


def covariance(spec: ModelSpec, lag: int) -> float:
    """Cov(N_l, N_{l+lag}) in stationarity; lag 0 gives Var(N).

    Direct matrix-power form theta^2 (delta M Gamma^k M 1^T - (delta m)^2),
    valid without the distinct-eigenvalue assumption.
    """
    if lag < 0:
        raise ConfigError(f"lag must be >= 0, got {lag}")
    _check_stationarity_grid(spec)
    delta = stationary_distribution(spec.gamma)
    m = spec.shapes.astype(float)
    theta = spec.theta
    mean_shape = float(delta @ m)
    if lag == 0:
        return theta**2 * (
            float(delta @ (m * (m + (1.0 + theta) / theta))) - mean_shape**2
        )
    cross = float((delta * m) @ k_step(spec.gamma, lag) @ m)
    return theta**2 * (cross - mean_shape**2)


def acf(spec: ModelSpec, lag: int) -> float:
    """Stationary autocorrelation rho(lag) = sum_{i>=2} c_i e_i^lag.

    Uses the spectral decomposition of the transition matrix; raises
    SpectralUnsupportedError for complex/repeated spectra, in which case
    callers should use covariance(spec, lag) / covariance(spec, 0).
    """
    if lag < 0:
        raise ConfigError(f"lag must be >= 0, got {lag}")
    _check_stationarity_grid(spec)
    if lag == 0:
        return 1.0
    if spec.g == 1:
        return 0.0
    sd = spectral_decompose(spec.gamma)
    delta = stationary_distribution(spec.gamma)
    m = spec.shapes.astype(float)
    theta = spec.theta
    denom = float(delta @ (m * (m + (1.0 + theta) / theta))) - float(delta @ m) ** 2
    rho = 0.0
    for i in range(1, spec.g):
        u_i = sd.right_vectors[:, i]
        v_i = sd.left_vectors[i, :]
        c_i = float((delta * m) @ u_i) * float(v_i @ m) / denom
        rho += c_i * sd.eigenvalues[i] ** lag
    return float(rho)


@dataclass(frozen=True)
class PascalMixtureUni:
    """Weighted Pascal mixture over shapes, single scale.

    ``deficit`` is the weight mass lost to truncation of the shape ladder;
    the enumerated weights plus the deficit account for total mass 1.
    """

    weights: dict
    scale: float
    deficit: float = field(default=0.0)

    def pmf(self, n: int) -> float:
        return float(sum(w * pascal_pmf(n, m, self.scale) for m, w in self.weights.items()))

    def tail_mass(self, n_max: int) -> float:
        """Mass the enumerated components place beyond n_max."""
        return float(sum(w * pascal_sf(n_max, m, self.scale) for m, w in self.weights.items()))


@dataclass(frozen=True)
class PascalMixtureMulti:
    """Sparse multivariate Pascal mixture with per-dimension scales."""

    scales: tuple
    weights: dict
    deficit: float = field(default=0.0)

    @property
    def dims(self) -> int:
        return len(self.scales)

    def pmf(self, counts) -> float:
        counts = [int(n) for n in counts]
        if len(counts) != self.dims:
            raise ConfigError("counts length must match mixture dimension")
        total = 0.0
        for shapes, w in self.weights.items():
            prod = w
            for n, m, theta in zip(counts, shapes, self.scales):
                prod *= pascal_pmf(n, m, theta)
            total += prod
        return total


def hmm_mixture(spec: ModelSpec, scales, periods=None) -> PascalMixtureMulti:
    """Multivariate Pascal mixture of the counts over the given periods.

    The weight of a shape tuple sums the hidden-path weights
    pi_{l_1, i_1} gamma_{i_1 i_2}(l_2 - l_1) ... over paths mapping to the
    same shapes. State paths are enumerated explicitly, so this is meant
    for small g and k.
    """
    k = len(scales)
    if periods is None:
        periods = list(range(1, k + 1))
    if len(periods) != k:
        raise ConfigError("periods and scales must have equal length")
    if spec.g**k > 2_000_000:
        raise PreconditionError(
            f"state-path enumeration with g^k = {spec.g}^{k} is too large; "
            "use Monte Carlo instead"
        )
    steps = [k_step(spec.gamma, b - a) for a, b in zip(periods, periods[1:])]
    pi_first = spec.pi_l(periods[0])
    weights: dict = {}
    for path in itertools.product(range(spec.g), repeat=k):
        beta = pi_first[path[0]]
        for j in range(k - 1):
            beta *= steps[j][path[j], path[j + 1]]
        if beta == 0.0:
            continue
        shapes = tuple(int(spec.shapes[i]) for i in path)
        weights[shapes] = weights.get(shapes, 0.0) + beta
    return PascalMixtureMulti(scales=tuple(float(s) for s in scales), weights=weights)


def _shape_ladder(n: int, ratio: float, tail_tol: float, max_len: int = 200_000):
    """Weights C(m-1, n-1) r^n (1-r)^(m-n) for m = n, n+1, ... until the
    cumulative mass reaches 1 - tail_tol."""
    if ratio >= 1.0 - 1e-15:
        return [(n, 1.0)]
    ladder = []
    w = ratio**n
    m = n
    cum = 0.0
    while cum < 1.0 - tail_tol and len(ladder) < max_len:
        ladder.append((m, w))
        cum += w
        w *= (m / (m + 1 - n)) * (1.0 - ratio)
        m += 1
    return ladder


def unify_scales(mix: PascalMixtureMulti, theta: float, eps: float = 1e-9) -> PascalMixtureMulti:
    """Re-express a multivariate Pascal mixture on a common scale theta.

    Each original shape n_j spawns a geometric-type ladder of shapes
    m_j >= n_j with binomial weights; theta must satisfy
    0 < theta <= min of the scales. The infinite weight tensor is
    truncated so that the lost mass is at most ``eps``; the achieved
    deficit (1 minus the enumerated mass) is recorded on the result.
    """
    positive = [s for s in mix.scales if s > 0]
    if theta <= 0 or (positive and theta > min(positive) * (1 + 1e-12)):
        raise ConfigError(
            f"common scale must satisfy 0 < theta <= min scale, got theta={theta}, "
            f"scales={mix.scales}"
        )
    if any(s == 0 for s in mix.scales):
        raise ConfigError("zero-scale dimensions must be dropped before unify_scales")
    k = mix.dims
    ratios = [theta / s for s in mix.scales]
    per_dim_tol = eps / max(k, 1)
    out: dict = {}
    for shapes in sorted(mix.weights):
        beta = mix.weights[shapes]
        ladders = [_shape_ladder(n, r, per_dim_tol) for n, r in zip(shapes, ratios)]
        for combo in itertools.product(*ladders):
            w = beta
            for _, lw in combo:
                w *= lw
            key = tuple(m for m, _ in combo)
            out[key] = out.get(key, 0.0) + w
    total = sum(out.values())
    deficit = max(mix.deficit, 1.0 - total)
    return PascalMixtureMulti(scales=(float(theta),) * k, weights=out, deficit=max(deficit, 0.0))


def aggregate(mix: PascalMixtureMulti) -> PascalMixtureUni:
    """Law of the coordinate sum of a common-scale multivariate mixture.

    Weights collapse by total shape: the sum of the coordinates is a
    univariate Pascal mixture with the same scale.
    """
    if len(set(mix.scales)) > 1:
        raise PreconditionError("aggregate requires a common scale; call unify_scales first")
    weights: dict = {}
    for shapes, w in mix.weights.items():
        m = int(sum(shapes))
        weights[m] = weights.get(m, 0.0) + w
    return PascalMixtureUni(weights=weights, scale=mix.scales[0], deficit=mix.deficit)


@dataclass(frozen=True)
class CountLaw:
    """Finite pmf table on {0, ..., n_max} with a declared tail-mass bound."""

    pmf: np.ndarray
    tail_bound: float

    @property
    def n_max(self) -> int:
        return self.pmf.size - 1

    def to_csv(self) -> str:
        lines = ["n,probability"]
        lines.extend(f"{n},{p:.12g}" for n, p in enumerate(self.pmf))
        lines.append(f"# tail_bound={self.tail_bound:.12g}")
        return "\n".join(lines) + "\n"


def marginal_count_law(
    spec: ModelSpec, l: int, eps: float = 1e-6, n_max: int | None = None
) -> CountLaw:
    """Finite pmf table of the period-l marginal (mixed Pascal) count."""
    if not 0.0 < eps < 0.1:
        raise ConfigError(f"eps must lie in (0, 0.1), got {eps}")
    weights = {}
    for w, m in zip(spec.pi_l(l), spec.shapes):
        weights[int(m)] = weights.get(int(m), 0.0) + float(w)
    uni = PascalMixtureUni(weights=weights, scale=spec.period_scale(l))
    if n_max is None:
        n_max = 16
        while uni.tail_mass(n_max) > eps:
            n_max *= 2
            if n_max > 1_000_000:
                raise AccuracyError("pmf support too heavy-tailed for the requested eps")
    ns = np.arange(0, n_max + 1, dtype=float)
    pmf = np.zeros(ns.size)
    for m, w in uni.weights.items():
        pmf += w * _pascal_pmf_vec(ns, m, uni.scale)
    bound = uni.tail_mass(n_max)
    if bound > eps:
        raise AccuracyError(f"tail bound {bound:.3g} exceeds eps={eps}; raise n_max")
    return CountLaw(pmf=pmf, tail_bound=float(bound))


def point_mass_law(n: int = 0) -> CountLaw:
    pmf = np.zeros(n + 1)
    pmf[n] = 1.0
    return CountLaw(pmf=pmf, tail_bound=0.0)


def total_count_law(
    spec: ModelSpec,
    delay: DelayModel,
    tau: float,
    which: str,
    eps: float = 1e-6,
    n_max: int | None = None,
) -> CountLaw:
    """Law of the total reported or IBNR count up to the valuation date.

    Pipeline: thinned per-period scales -> multivariate Pascal mixture over
    hidden paths -> common-scale re-expression at theta* = min positive
    scale -> shape aggregation -> pmf table. Periods with zero scale
    contribute deterministically zero counts and are dropped. The declared
    tail bound (truncation deficit + mass beyond n_max) is kept <= eps;
    if that is unattainable for the requested n_max an AccuracyError is
    raised and Monte Carlo is the documented fallback.
    """
    if which not in ("reported", "ibnr"):
        raise ConfigError(f"which must be 'reported' or 'ibnr', got '{which}'")
    if not 0.0 < eps < 0.1:
        raise ConfigError(f"eps must lie in (0, 0.1), got {eps}")
    sc = thinned_scales(spec, delay, tau)
    vec = sc.reported if which == "reported" else sc.ibnr
    periods = [j + 1 for j in range(vec.size) if vec[j] > 0.0]
    if not periods:
        return point_mass_law(0)
    scales = [float(vec[j - 1]) for j in periods]
    mix = hmm_mixture(spec, scales, periods)
    theta_star = min(scales)
    unified = unify_scales(mix, theta_star, eps=eps / 2.0)
    uni = aggregate(unified)
    ns_all = np.arange(0, (n_max or 0) + 1)
    if n_max is None:
        # grow the table until the enumerated tail fits inside the budget
        budget = eps - uni.deficit
        if budget <= 0:
            raise AccuracyError(
                f"truncation deficit {uni.deficit:.3g} already exceeds eps={eps}"
            )
        n_max = 16
        while uni.tail_mass(n_max) > budget:
            n_max *= 2
            if n_max > 1_000_000:
                raise AccuracyError("pmf support too heavy-tailed for the requested eps")
        ns_all = np.arange(0, n_max + 1)
    pmf = np.zeros(ns_all.size)
    for m, w in uni.weights.items():
        pmf += w * _pascal_pmf_vec(ns_all.astype(float), m, uni.scale)
    bound = uni.deficit + uni.tail_mass(int(ns_all[-1]))
    if bound > eps:
        raise AccuracyError(
            f"declared tail bound {bound:.3g} exceeds eps={eps}; raise n_max or "
            "fall back to Monte Carlo"
        )
    return CountLaw(pmf=pmf, tail_bound=float(bound))

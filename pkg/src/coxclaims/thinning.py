"""Reported/IBNR thinning at a valuation date.

The reported sub-process keeps arrivals with T + U <= tau; the IBNR
sub-process keeps the rest. Both remain marked Cox processes: the
per-period Pascal scales split as

    theta_j^r    = (int_{d_{j-1}}^{d_j} P_U(tau - t) dt) * omega_j * theta
    theta_j^ibnr = (d_j - d_{j-1}) * omega_j * theta - theta_j^r

and the marks follow truncated/shifted versions of the common delay law.
"""

from dataclasses import dataclass

import numpy as np

from .delays import DelayModel, integrated_cdf
from .errors import PreconditionError
from .model import ModelSpec


@dataclass(frozen=True)
class ThinnedScales:
    """Per-period Pascal scales of the reported and IBNR count processes."""

    reported: np.ndarray
    ibnr: np.ndarray
    valuation: float

    def __post_init__(self):
        if np.any(self.reported < 0) or np.any(self.ibnr < 0):
            raise PreconditionError("thinned scales must be nonnegative")


def thinned_scales(spec: ModelSpec, delay: DelayModel, tau: float) -> ThinnedScales:
    """Split each period's Pascal scale into reported and IBNR parts.

    ``tau`` must be a grid point. The IBNR part is computed as the
    complement of the reported part so the conservation identity
    theta_j^r + theta_j^ibnr = (d_j - d_{j-1}) * omega_j * theta holds
    exactly.
    """
    k = spec.grid_index(tau)
    if k < 1:
        raise PreconditionError("valuation date must be at or after d_1")
    reported = np.empty(k)
    ibnr = np.empty(k)
    for j in range(1, k + 1):
        lo, hi, omega, _ = spec.interval(j)
        mass = integrated_cdf(delay, lo, hi, tau)
        reported[j - 1] = mass * omega * spec.theta
        ibnr[j - 1] = ((hi - lo) - mass) * omega * spec.theta
    return ThinnedScales(reported=reported, ibnr=ibnr, valuation=float(tau))


def reported_mark_density(delay: DelayModel, t: float, tau: float, u: float) -> float:
    """Delay density of a reported claim that arrived at time t.

    p_U(u) / P_U(tau - t) on [0, tau - t], zero elsewhere.
    """
    if not 0 <= t <= tau:
        raise PreconditionError(f"arrival time must lie in [0, tau], got t={t}, tau={tau}")
    denom = delay.cdf(tau - t)
    if denom <= 0.0:
        raise PreconditionError(
            "no reporting mass before the valuation date (P_U(tau - t) = 0)"
        )
    if u < 0 or u > tau - t:
        return 0.0
    return delay.pdf(u) / denom


def ibnr_mark_density(delay: DelayModel, t: float, tau: float, u: float) -> float:
    """Delay density of an IBNR claim that arrived at time t.

    p_U(u) / (1 - P_U(tau - t)) on [tau - t, inf), zero elsewhere.
    """
    if not 0 <= t <= tau:
        raise PreconditionError(f"arrival time must lie in [0, tau], got t={t}, tau={tau}")
    surv = 1.0 - delay.cdf(tau - t)
    if surv <= 0.0:
        raise PreconditionError(
            "every delay is reported by the valuation date (P_U(tau - t) = 1)"
        )
    if u < tau - t:
        return 0.0
    return delay.pdf(u) / surv

"""Marked Cox claim-arrival model with Erlang-HMM intensity.

Simulation of claim arrivals with reporting delays, reported/IBNR
thinning at a valuation date, and closed-form count distributions
(marginal, joint, ACF, aggregate totals) for the discretized process.
"""

__version__ = "0.1.0"

from .delays import (
    DegenerateDelay,
    DelayModel,
    EmpiricalDelay,
    ExponentialDelay,
    UniformDelay,
    WeibullDelay,
    delay_from_dict,
    integrated_cdf,
)
from .errors import (
    AccuracyError,
    ConfigError,
    ModelError,
    PreconditionError,
    SpectralUnsupportedError,
    UnsupportedChainError,
)
from .markov import (
    SpectralDecomposition,
    k_step,
    spectral_decompose,
    stationary_distribution,
    validate_chain,
)
from .model import (
    IntensityPath,
    ModelSpec,
    lambda_marginal_density,
    sample_path,
    spec_from_dict,
    state_dependent_density,
)
from .pascal import (
    CountLaw,
    PascalMixtureMulti,
    PascalMixtureUni,
    acf,
    aggregate,
    covariance,
    hmm_mixture,
    joint_pmf,
    marginal_pmf,
    pascal_pmf,
    total_count_law,
    unify_scales,
)
from .simulate import ClaimRecord, ClaimSet, classify, discretize, simulate, simulate_batch
from .thinning import ThinnedScales, ibnr_mark_density, reported_mark_density, thinned_scales
from .validation import KsReport, McCountPmf, brute_force_joint, ks_uniform, mc_count_pmf

__all__ = [
    "__version__",
    "AccuracyError",
    "ConfigError",
    "ModelError",
    "PreconditionError",
    "SpectralUnsupportedError",
    "UnsupportedChainError",
    "DelayModel",
    "DegenerateDelay",
    "ExponentialDelay",
    "UniformDelay",
    "WeibullDelay",
    "EmpiricalDelay",
    "delay_from_dict",
    "integrated_cdf",
    "SpectralDecomposition",
    "validate_chain",
    "stationary_distribution",
    "k_step",
    "spectral_decompose",
    "ModelSpec",
    "IntensityPath",
    "spec_from_dict",
    "state_dependent_density",
    "lambda_marginal_density",
    "sample_path",
    "ThinnedScales",
    "thinned_scales",
    "reported_mark_density",
    "ibnr_mark_density",
    "pascal_pmf",
    "marginal_pmf",
    "joint_pmf",
    "covariance",
    "acf",
    "hmm_mixture",
    "unify_scales",
    "aggregate",
    "total_count_law",
    "PascalMixtureUni",
    "PascalMixtureMulti",
    "CountLaw",
    "ClaimRecord",
    "ClaimSet",
    "simulate",
    "simulate_batch",
    "classify",
    "discretize",
    "brute_force_joint",
    "mc_count_pmf",
    "ks_uniform",
    "KsReport",
    "McCountPmf",
]

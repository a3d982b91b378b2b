"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems -> 2,
violated preconditions -> 3, accuracy failures -> 4.
"""


class ModelError(ValueError):
    """Base class for all model-related errors."""


class ConfigError(ModelError):
    """Malformed input: bad matrix, bad JSON config, out-of-range parameter."""


class UnsupportedChainError(ModelError):
    """Chain is reducible or periodic; limiting-distribution machinery refuses."""


class SpectralUnsupportedError(ModelError):
    """Complex or near-repeated eigenvalues; use the direct covariance path."""


class PreconditionError(ModelError):
    """An operation's stated precondition is violated (off-grid valuation,
    non-normalized stationarity grid, degenerate conditioning, ...)."""


class AccuracyError(ModelError):
    """Requested tolerance cannot be met by the truncated series; use Monte Carlo."""

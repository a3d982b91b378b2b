"""Finite-state discrete-time Markov chain algebra.

Validation of transition matrices, k-step transitions, stationary
distribution and spectral decomposition with paired left/right
eigenvectors normalized so that v_i u_i^T = 1.
"""

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import ConfigError, SpectralUnsupportedError, UnsupportedChainError

ROW_SUM_TOL = 1e-12
EIG_REAL_TOL = 1e-10
EIG_GAP_TOL = 1e-8


def check_transition_matrix(gamma) -> np.ndarray:
    """Validate a transition matrix and return it as a float ndarray.

    Raises
    ------
    ConfigError
        If the matrix is not square, has entries outside [0, 1], or a
        row that does not sum to 1 within 1e-12 (the offending row is named).
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise ConfigError(f"transition matrix must be square, got shape {gamma.shape}")
    if gamma.shape[0] < 1:
        raise ConfigError("transition matrix must have at least one state")
    if np.any(gamma < 0) or np.any(gamma > 1):
        bad = int(np.argwhere((gamma < 0) | (gamma > 1))[0][0])
        raise ConfigError(f"transition matrix row {bad} has an entry outside [0, 1]")
    row_sums = gamma.sum(axis=1)
    off = np.abs(row_sums - 1.0)
    if np.any(off > ROW_SUM_TOL):
        bad = int(np.argmax(off))
        raise ConfigError(
            f"transition matrix row {bad} sums to {row_sums[bad]:.15g}, not 1"
        )
    return gamma


def check_distribution(pi) -> np.ndarray:
    """Validate a probability vector (nonnegative, sums to 1 within 1e-12)."""
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1:
        raise ConfigError(f"distribution must be a vector, got shape {pi.shape}")
    if np.any(pi < 0):
        raise ConfigError("distribution has a negative entry")
    if abs(pi.sum() - 1.0) > ROW_SUM_TOL:
        raise ConfigError(f"distribution sums to {pi.sum():.15g}, not 1")
    return pi


@dataclass(frozen=True)
class ChainDiagnosis:
    irreducible: bool
    aperiodic: bool


def validate_chain(gamma) -> ChainDiagnosis:
    """Diagnose irreducibility (strong connectivity of the positive-entry
    digraph) and aperiodicity (gcd of cycle lengths)."""
    gamma = check_transition_matrix(gamma)
    graph = nx.from_numpy_array(gamma > 0, create_using=nx.DiGraph)
    irreducible = nx.is_strongly_connected(graph)
    try:
        aperiodic = nx.is_aperiodic(graph)
    except nx.NetworkXError:
        aperiodic = False
    return ChainDiagnosis(irreducible=irreducible, aperiodic=aperiodic)


def stationary_distribution(gamma) -> np.ndarray:
    """Limiting distribution delta with delta @ gamma = delta.

    Solved as a linear system: one balance equation is replaced with
    the normalization constraint, so the result is exact to solver
    tolerance (no power iteration).

    Raises
    ------
    UnsupportedChainError
        If the chain is reducible or periodic.
    """
    gamma = check_transition_matrix(gamma)
    diag = validate_chain(gamma)
    if not (diag.irreducible and diag.aperiodic):
        raise UnsupportedChainError(
            "stationary distribution requires an irreducible, aperiodic chain "
            f"(irreducible={diag.irreducible}, aperiodic={diag.aperiodic})"
        )
    g = gamma.shape[0]
    a = gamma.T - np.eye(g)
    a[-1, :] = 1.0
    b = np.zeros(g)
    b[-1] = 1.0
    delta = np.linalg.solve(a, b)
    # guard against tiny negative round-off
    delta = np.clip(delta, 0.0, None)
    return delta / delta.sum()


def k_step(gamma, k: int) -> np.ndarray:
    """k-step transition probability matrix gamma**k (k = 0 gives identity)."""
    gamma = check_transition_matrix(gamma)
    if k < 0:
        raise ConfigError(f"step count must be nonnegative, got {k}")
    return np.linalg.matrix_power(gamma, int(k))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending with paired right/left eigenvectors.

    ``right_vectors[:, i]`` is u_i^T (column), ``left_vectors[i, :]`` is v_i
    (row), scaled so v_i u_i^T = 1 and gamma**k = sum_i e_i^k u_i^T v_i.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray

    def reconstruct(self, k: int) -> np.ndarray:
        """Rebuild gamma**k from the decomposition."""
        return (self.right_vectors * self.eigenvalues**k) @ self.left_vectors


def spectral_decompose(gamma) -> SpectralDecomposition:
    """Spectral decomposition of a stochastic matrix with real distinct spectrum.

    Raises
    ------
    SpectralUnsupportedError
        If any eigenvalue has imaginary part above 1e-10 or two eigenvalues
        are closer than 1e-8. Callers should fall back to the direct
        matrix-power covariance path.
    """
    gamma = check_transition_matrix(gamma)
    eigvals, right = np.linalg.eig(gamma)
    if np.max(np.abs(eigvals.imag)) > EIG_REAL_TOL:
        raise SpectralUnsupportedError(
            "transition matrix has complex eigenvalues; "
            "use the direct covariance path"
        )
    eigvals = eigvals.real
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    if np.any(np.diff(eigvals) > -EIG_GAP_TOL):
        raise SpectralUnsupportedError(
            "transition matrix has (near-)repeated eigenvalues; "
            "use the direct covariance path"
        )
    right = np.real(right[:, order])
    # rows of inv(right) are the left eigenvectors; the pairing v_i u_i^T = 1
    # holds by construction
    left = np.linalg.inv(right)
    return SpectralDecomposition(
        eigenvalues=eigvals, right_vectors=right, left_vectors=left
    )

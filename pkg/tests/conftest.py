import numpy as np
import pytest

from coxclaims import ExponentialDelay, ModelSpec

REF_GAMMA = np.array([[0.9, 0.1], [0.2, 0.8]])


@pytest.fixture
def ref_spec():
    """Two-state reference model: m=(1,3), theta=0.5, unit grid, 3 periods."""
    return ModelSpec(
        gamma=REF_GAMMA,
        pi1=[1.0, 0.0],
        shapes=[1, 3],
        theta=0.5,
        grid=[0.0, 1.0, 2.0, 3.0],
        exposures=[1.0, 1.0, 1.0],
    )


@pytest.fixture
def ref_delay():
    return ExponentialDelay(rate=1.0)


@pytest.fixture
def ref_config_dict():
    return {
        "g": 2,
        "gamma": [0.9, 0.1, 0.2, 0.8],
        "pi1": [1.0, 0.0],
        "shapes": [1, 3],
        "theta": 0.5,
        "grid": [0.0, 1.0, 2.0, 3.0],
        "exposures": [1.0, 1.0, 1.0],
        "delay": {"family": "exponential", "params": {"rate": 1.0}},
        "valuation": 3.0,
        "seed": 20260823,
    }


def random_stochastic_matrix(rng, g):
    """Row-stochastic matrix with strictly positive entries."""
    return rng.dirichlet(np.ones(g) * 2.0 + rng.random(g) * 3.0, size=g)


def random_distribution(rng, g):
    return rng.dirichlet(np.ones(g))

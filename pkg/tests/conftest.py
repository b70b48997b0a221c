import numpy as np
import pytest

from masertur import EngineParams

# Operating point used across the suite: strong upper-bath coupling, weak
# lower-bath coupling, inverted occupations, resonant moderate drive.
FIG2 = EngineParams(gamma_u=2.0, gamma_l=0.1, n_u=0.027, n_l=5.0, epsilon=0.15, delta=0.0)


def random_params(rng: np.random.Generator, min_gap: float = 1e-3) -> EngineParams:
    """One draw from the standard exploration region (uniform ranges)."""
    while True:
        n_u = rng.uniform(1e-4, 10.0)
        n_l = rng.uniform(1e-4, 10.0)
        if abs(n_l - n_u) >= min_gap:
            break
    return EngineParams(
        gamma_u=rng.uniform(1e-4, 5.0),
        gamma_l=rng.uniform(1e-4, 5.0),
        n_u=n_u,
        n_l=n_l,
        epsilon=rng.uniform(1e-4, 1.0),
        delta=rng.uniform(0.0, 1.0),
    )


@pytest.fixture
def fig2() -> EngineParams:
    return FIG2


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)

import numpy as np
import pytest

from robustfl.system import LtiSystem, double_integrator, random_controllable


@pytest.fixture
def plant() -> LtiSystem:
    return double_integrator()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def system_ensemble(count, seed=0, n_range=(1, 4), m_range=(1, 2)):
    """Random controllable systems with n and m drawn uniformly from the given ranges."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        out.append(random_controllable(n, m, rng))
    return out


def theorem_length(n, m):
    # comfortably more columns than the (n+1)m rows of the depth-(n+1) input Hankel matrix
    return (n + 1) * m + n + 20

"""
Shared fixtures
"""
import numpy as np
import pytest

from vorticity_waves.geometry.profile import assess_solution
from vorticity_waves.model.parameters import exact_solution
from vorticity_waves.models.schemas import Params, SolverOptions
from vorticity_waves.spectral.cache import multiplier_cache

N_TEST = 64


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def options():
    return SolverOptions()


@pytest.fixture
def exact_point():
    """Solution of the zero-gravity family at a given a, truncated at N_TEST"""

    def build(a: float, N: int = N_TEST):
        return assess_solution(exact_solution(a, N), Params(G=0.0, a=a, l=0.0))

    return build


@pytest.fixture(autouse=True)
def fresh_cache():
    multiplier_cache.clear()
    yield
    multiplier_cache.clear()

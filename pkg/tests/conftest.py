import numpy as np
import pytest

from varbesov.calderon import build_continuous_pair, build_dyadic, build_local_means
from varbesov.grid import GridFunction, GridSpec, ScaleGrid


@pytest.fixture(scope="session")
def spec():
    return GridSpec(1, 1024, 16.0)


@pytest.fixture(scope="session")
def scales():
    return ScaleGrid(8, 5)


@pytest.fixture(scope="session")
def pair(spec, scales):
    return build_continuous_pair(spec, scales)


@pytest.fixture(scope="session")
def pair_gauss(spec, scales):
    return build_continuous_pair(spec, scales, profile="gauss")


@pytest.fixture(scope="session")
def pair_mu_eta(spec, scales):
    return build_continuous_pair(spec, scales, profile="mu-eta")


@pytest.fixture(scope="session")
def dyadic(spec):
    return build_dyadic(spec, 5)


@pytest.fixture(scope="session")
def local_means(spec):
    return build_local_means(3, 1.0, spec)


@pytest.fixture
def gaussian(spec):
    (x,) = spec.coords()
    return GridFunction(spec, np.exp(-(x**2) / 2.0))

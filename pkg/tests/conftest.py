import pytest

from ic_rates import EstimatorConfig, make_qam


@pytest.fixture(scope="session")
def q4():
    return make_qam(4)


@pytest.fixture(scope="session")
def q16():
    return make_qam(16)


@pytest.fixture
def quad_cfg():
    return EstimatorConfig(method="quad")


@pytest.fixture
def mc_cfg():
    return EstimatorConfig(method="mc", samples=20000, seed=7)

import pytest

from aniso_trace import ConstructionConfig, build, lp


@pytest.fixture(scope="session")
def eq_l2():
    return build(ConstructionConfig(lp(2), 0.1, 0.0, 6, "equality"))


@pytest.fixture(scope="session")
def ef_l2():
    return build(ConstructionConfig(lp(2), 0.1, 0.0, 6, "equality_fraction", rho=0.8))

import numpy as np
import pytest

from gpchannels import build_mub_family


@pytest.fixture(scope="session")
def fam2():
    return build_mub_family(2)


@pytest.fixture(scope="session")
def fam3():
    return build_mub_family(3)


@pytest.fixture(scope="session")
def fam5():
    return build_mub_family(5)


@pytest.fixture(scope="session")
def fam7():
    return build_mub_family(7)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)

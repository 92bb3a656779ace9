import numpy as np
import pytest

from contraction_lab.contraction import scalar_example_system
from contraction_lab.counterexample import build_counterexample, find_r_star


@pytest.fixture(scope="session")
def r_star_cert():
    return find_r_star((0.1, 4.0), 1e-13)


@pytest.fixture(scope="session")
def r_star(r_star_cert):
    return r_star_cert.r_star


@pytest.fixture(scope="session")
def forced_system(r_star):
    return build_counterexample(r_star)


@pytest.fixture(scope="session")
def scalar_system():
    return scalar_example_system()


@pytest.fixture()
def rng():
    return np.random.default_rng(0)

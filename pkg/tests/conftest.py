import numpy as np
import pytest

from robin_nls.config import DEFAULT_TOLERANCES
from robin_nls.profiles import gaussian, soliton
from robin_nls.scattering import build_table
from robin_nls.solitons import SolitonParams

H = 2.0 ** -7
K_GRID = np.linspace(-8.0, 8.0, 257)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow PDE/asymptotics comparisons")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tol():
    return DEFAULT_TOLERANCES


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def defocusing_params():
    return SolitonParams(lam=1, omega=1.0, alpha=1.0)


@pytest.fixture(scope="session")
def focusing_params():
    return SolitonParams(lam=-1, omega=1.0, phi=0.5)


@pytest.fixture(scope="session")
def focusing_two_params():
    return SolitonParams(lam=-1, omega=1.0, phi=-0.5)


@pytest.fixture(scope="session")
def defocusing_profile(defocusing_params):
    return soliton(defocusing_params, H)


@pytest.fixture(scope="session")
def focusing_profile(focusing_params):
    return soliton(focusing_params, H)


@pytest.fixture(scope="session")
def focusing_two_profile(focusing_two_params):
    return soliton(focusing_two_params, H)


@pytest.fixture(scope="session")
def gaussian_profile():
    return gaussian(0.3, lam=1, q=-1.0, h=H)


@pytest.fixture(scope="session")
def defocusing_table(defocusing_profile):
    return build_table(defocusing_profile, K_GRID)


@pytest.fixture(scope="session")
def focusing_table(focusing_profile):
    return build_table(focusing_profile, K_GRID)


@pytest.fixture(scope="session")
def focusing_two_table(focusing_two_profile):
    return build_table(focusing_two_profile, K_GRID)


@pytest.fixture(scope="session")
def gaussian_table(gaussian_profile):
    return build_table(gaussian_profile, K_GRID)

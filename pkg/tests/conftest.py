import os

# Settings are read when app.core.config is first imported
os.environ.setdefault("HC_MAX_TREE_VERTICES", "25")
os.environ.setdefault("HC_THREADS", "2")

import pytest  # noqa: E402

from app.api.schemas import InvariantSet, ModelParams  # noqa: E402
from app.core.system import ti_fixed_point  # noqa: E402
from app.services.critical import lambda_cr_I2  # noqa: E402


@pytest.fixture
def params_k3_i1():
    """I2 case k=3, i=1 above the critical activity."""
    return ModelParams(k=3, i=1, lam=1.8)


@pytest.fixture(scope="session")
def critical_report():
    """lambda3 minimisation, computed once per session."""
    return lambda_cr_I2()


@pytest.fixture
def ti_value():
    """TI fixed point factory."""
    return lambda k, lam: ti_fixed_point(k, lam)


@pytest.fixture
def fast_resolution():
    """Oracle resolution for tests that do not assert resolution stability."""
    return 600


@pytest.fixture
def i2_set():
    return InvariantSet.I2


def pytest_configure(config):
    """Register markers."""
    config.addinivalue_line("markers", "slow: oracle grids at full resolution")

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qembed.library import lung_net, scattering_net

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def lung():
    return lung_net()


@pytest.fixture
def scattering():
    return scattering_net(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

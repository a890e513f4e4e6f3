import pytest
from hypothesis import HealthCheck, settings

from weightedtrace.lie_core import su2

settings.register_profile("project", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("project")


@pytest.fixture(scope="session")
def alg():
    return su2()

import pytest
from hypothesis import HealthCheck, settings

from zetakit.cyclofield import build_field

settings.register_profile(
    "zetakit",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("zetakit")


@pytest.fixture(scope="session")
def F2():
    return build_field(2, 1)


@pytest.fixture(scope="session")
def F3():
    return build_field(3, 1)


@pytest.fixture(scope="session")
def F4():
    return build_field(2, 2)


@pytest.fixture(scope="session")
def F5():
    return build_field(5, 1)


@pytest.fixture(scope="session")
def F9():
    return build_field(3, 2)

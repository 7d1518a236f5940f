import pytest

from dsasim import HardwareConfig, builtin_network


@pytest.fixture(scope="session")
def cfg():
    return HardwareConfig()


@pytest.fixture(scope="session")
def alexnet():
    return builtin_network("alexnet")


@pytest.fixture(scope="session")
def vgg16():
    return builtin_network("vgg16")

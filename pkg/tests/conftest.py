import pytest

from zenoswitch.model import default_bundle


@pytest.fixture(scope="session")
def bundle():
    return default_bundle()


@pytest.fixture(scope="session")
def res(bundle):
    return bundle.resonator


@pytest.fixture(scope="session")
def loss(bundle):
    return bundle.loss


@pytest.fixture(scope="session")
def vapor(bundle):
    return bundle.vapor

import pytest

from qsixj import QContext


@pytest.fixture(scope="session")
def classical():
    return QContext.classical()


@pytest.fixture(scope="session", params=[5, 7, 10, 16])
def root(request):
    return QContext.root_of_unity(request.param)

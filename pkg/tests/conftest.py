import pytest

from minkowski_lab.identities import _table


@pytest.fixture(scope="session")
def table4096():
    return _table(4096)

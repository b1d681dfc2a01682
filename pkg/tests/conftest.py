import pytest

from openquintic import modsolver


@pytest.fixture(scope="session")
def bundle61():
    """One shared high-order solve; plenty for every coefficient test."""
    return modsolver.solve(61)

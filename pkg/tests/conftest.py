import pytest

from aoilab import derive_params


@pytest.fixture(scope="session")
def std_params():
    """Node constants from the standard floor used throughout: cost 1, floor 0.05."""
    return derive_params(1.0, 0.05)

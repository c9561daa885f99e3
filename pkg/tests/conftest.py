import pytest

from causalurn import ObservedTable


@pytest.fixture
def pit():
    """The worked example: 32 treated (18 survived), 21 control (5 survived)."""
    return ObservedTable(18, 14, 5, 16)

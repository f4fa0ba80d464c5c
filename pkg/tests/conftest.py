import pytest

from minlength_kg.model import P1


@pytest.fixture
def p1():
    return P1

import pytest

from fanlim.fan import validate_fan


@pytest.fixture
def p1():
    return validate_fan(1, [(1,), (-1,)], [[0], [1]])


@pytest.fixture
def a2():
    return validate_fan(2, [(1, 0), (0, 1)], [[0, 1]])


@pytest.fixture
def p2():
    return validate_fan(2, [(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [2, 0]])


@pytest.fixture
def p1xp1():
    return validate_fan(
        2,
        [(1, 0), (-1, 0), (0, 1), (0, -1)],
        [[0, 2], [0, 3], [1, 2], [1, 3]],
    )


@pytest.fixture
def hirzebruch1():
    return validate_fan(
        2,
        [(1, 0), (0, 1), (-1, 1), (0, -1)],
        [[0, 1], [1, 2], [2, 3], [3, 0]],
    )

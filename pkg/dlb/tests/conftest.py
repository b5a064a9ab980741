import pytest

from dlb.graphs import complete2, cycle, path, torus2d


@pytest.fixture
def k2():
    return complete2()


@pytest.fixture
def cycle4():
    return cycle(4)


@pytest.fixture
def torus3():
    return torus2d(3, 3)


@pytest.fixture
def hetero_path():
    return path(4).with_speeds([1.0, 2.0, 3.0, 4.0])

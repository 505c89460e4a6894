import pytest

from lingeo import LinearSpace, projective_plane, validate

FANO_LINES = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


@pytest.fixture
def fano():
    """A hand-labelled 7-point plane (not the algebraic labelling)."""
    return validate(7, FANO_LINES)


@pytest.fixture
def quadrilateral():
    return LinearSpace(4, ())


@pytest.fixture
def pentagon():
    return LinearSpace(5, ())


@pytest.fixture
def near_pencil():
    return LinearSpace(4, ((0, 1, 2),))


@pytest.fixture
def triangle():
    return LinearSpace(3, ())


@pytest.fixture(scope="session")
def pg2():
    return projective_plane(2)


@pytest.fixture(scope="session")
def pg3():
    return projective_plane(3)


@pytest.fixture(scope="session")
def pg4():
    return projective_plane(4)

import pytest

from modshift.bundled import checkerboard_system, torsion_demo_system


@pytest.fixture(scope="session")
def cb_system():
    return checkerboard_system()


@pytest.fixture(scope="session")
def torsion_system():
    return torsion_demo_system()

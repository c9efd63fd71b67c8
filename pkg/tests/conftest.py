import pytest

from nhq.sampling import a2, a3p, jordan, two_loop


@pytest.fixture
def J():
    return jordan()


@pytest.fixture
def A2():
    return a2()


@pytest.fixture
def A3P():
    return a3p()


@pytest.fixture
def L2():
    return two_loop()

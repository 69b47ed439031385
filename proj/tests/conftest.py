import pytest


def pytest_addoption(parser):
    parser.addoption("--cli", action="store", default=None, help="path to the halfparity executable")


@pytest.fixture(scope="session")
def cli(request):
    path = request.config.getoption("--cli")
    if not path:
        pytest.skip("--cli not given")
    return path

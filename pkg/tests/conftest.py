import pytest

from shorsim import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Compile the jitted kernels (when active) before any timed test runs.
    _kernels.warm_up()

import pytest

from mahcm import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jitted kernels once so timed tests measure work, not JIT
    kernels.warmup()

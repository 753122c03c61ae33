import numpy as np
import pytest

from oloid import OloidSpec
from oloid.mesh import MeshConfig, tessellate

# reference values for the unit oloid
VOLUME = 3.05241846842437
IXX = 0.76535025749314262939
IYY = 1.45551287346920034498


@pytest.fixture
def unit():
    return OloidSpec(1.0, 1.0)


@pytest.fixture(scope="session")
def fine_mesh():
    return tessellate(OloidSpec(), MeshConfig(256, 512))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = test_acceptance.pytest_terminal_summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

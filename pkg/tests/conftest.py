import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from latticegon import EllipseFocusBody, PolygonBody, RadialBody, RadialFunction, scale_to_unit_area, unit_area_disk  # noqa: E402

QUAD = [(1.2, -0.3), (0.4, 0.9), (-0.8, 0.5), (-0.5, -0.9)]


def off_centre_ellipse(n=4096, centre=(0.3, 0.1), a=1.0, b=0.6):
    """Radial samples of an ellipse whose centre is not the origin."""
    t = 2 * np.pi * np.arange(n) / n
    u, v = np.cos(t), np.sin(t)
    A = (u / a) ** 2 + (v / b) ** 2
    B = -2 * (centre[0] * u / a**2 + centre[1] * v / b**2)
    C = (centre[0] / a) ** 2 + (centre[1] / b) ** 2 - 1
    return RadialFunction((-B + np.sqrt(B * B - 4 * A * C)) / (2 * A))


@pytest.fixture(scope="session")
def disk():
    return unit_area_disk()


@pytest.fixture(scope="session")
def quad():
    return scale_to_unit_area(PolygonBody(QUAD))


@pytest.fixture(scope="session")
def egg():
    return scale_to_unit_area(RadialBody(off_centre_ellipse()))


@pytest.fixture(scope="session")
def ef():
    return scale_to_unit_area(EllipseFocusBody(1.0, (0.5, 0.2)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "LINES", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[k])

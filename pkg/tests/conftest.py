import math

import pytest

from ellipse_lab.geometry import make_ellipse

# filled by the acceptance module, printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def g():
    """Default ellipse a = sqrt 2, b = 1 (so c = 1, cosh^2 rho_max = 2)."""
    return make_ellipse(math.sqrt(2.0), 1.0)


@pytest.fixture(scope="session")
def g21():
    return make_ellipse(2.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])

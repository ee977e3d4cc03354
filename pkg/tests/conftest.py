import numpy as np
import pytest

from hgflow.grid import build_grid

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def periodic_grid():
    return build_grid(0.0, 2.0 * np.pi, 256, "periodic")


@pytest.fixture
def line_grid():
    return build_grid(-10.0, 10.0, 256, "constant_extension")

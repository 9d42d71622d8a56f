import numpy as np
import pytest

from lsm_stability import PathSet, TimeGrid

# explicit 4-path, two-step table; columns are t_0, t_1, t_2
FOUR_PATHS = np.array(
    [
        [1.0, 1.1, 1.2],
        [1.0, 0.9, 0.8],
        [1.0, 1.0, 0.7],
        [1.0, 0.8, 1.0],
    ]
)


@pytest.fixture
def four_paths():
    return PathSet(TimeGrid(1.0, 2), FOUR_PATHS)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)

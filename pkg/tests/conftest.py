import pytest

from tests import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(acceptance_log.LINES):
        terminalreporter.write_line(acceptance_log.LINES[key])


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)

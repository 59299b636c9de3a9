import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("focusjet", max_examples=40, deadline=None)
settings.load_profile("focusjet")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num].line())

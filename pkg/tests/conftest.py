import os

import pytest
from hypothesis import HealthCheck, settings

from hopfnode.spectrum import Params

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def fig():
    """Parameters of the trajectory figure: b = 0.3, c = (0, -1), eps3 = 0.002."""
    return Params(b=0.3, c1=0.0, c2=-1.0, eps3=0.002)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(LINES):
            terminalreporter.write_line(LINES[number])

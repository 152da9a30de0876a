import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "orbitfib", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("orbitfib")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def antidiag(a, b):
    return np.array([[0, a], [b, 0]], dtype=complex)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

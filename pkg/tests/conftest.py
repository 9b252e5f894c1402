import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("convsym", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("convsym")


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria with pinned tolerances")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

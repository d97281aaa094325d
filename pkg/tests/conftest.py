import pytest
from hypothesis import HealthCheck, settings

from cantorcomb.domain import CombDomain

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")

# acceptance criteria report one line each at the end of the session
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture(scope="session")
def comb13():
    return CombDomain.build(1.0 / 3.0)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

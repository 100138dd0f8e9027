import pytest

from capplan import cases, solve

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ieee14():
    return cases.ieee14()


@pytest.fixture(scope="session")
def ieee14_solution(ieee14):
    return solve(ieee14)


@pytest.fixture(scope="session")
def feeder():
    return cases.radial_feeder()


@pytest.fixture(scope="session")
def feeder_solution(feeder):
    return solve(feeder)


@pytest.fixture
def acceptance_log():
    """Collector for the one-line-per-criterion acceptance verdicts."""
    def record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)

import os

import pytest
from hypothesis import HealthCheck, settings

from parem.automata import build_search_dfa

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

WORKED_INPUT = "plaraparallelapareparapl"

PARALLEL_TABLE = [
    [1, 0, 0, 0, 0],
    [1, 2, 0, 0, 0],
    [1, 0, 3, 0, 0],
    [1, 4, 0, 0, 0],
    [1, 0, 0, 0, 5],
    [1, 0, 0, 0, 6],
    [1, 0, 0, 7, 0],
    [1, 0, 0, 0, 8],
    [1, 0, 0, 0, 0],
]


@pytest.fixture(scope="session")
def parallel_dfa():
    return build_search_dfa("parallel", list("parel"))


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

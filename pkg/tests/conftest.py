import random

import pytest

from inqml.data import load_fig1

# acceptance verdicts, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fig1():
    return load_fig1()


@pytest.fixture
def rng():
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

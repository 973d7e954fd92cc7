import pytest

from heckeqf.arith import FactorTable
from heckeqf.eigenform import SUPPORTED_WEIGHTS, make_eigenform

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table_100k():
    return FactorTable.build(100_000)


@pytest.fixture(scope="session")
def delta_100k():
    return make_eigenform(12, 100_000)


@pytest.fixture(scope="session")
def forms_2000():
    return {k: make_eigenform(k, 2000) for k in SUPPORTED_WEIGHTS}


@pytest.fixture(scope="session")
def table_5000():
    return FactorTable.build(5000)


@pytest.fixture(scope="session")
def delta_5000():
    return make_eigenform(12, 5000)

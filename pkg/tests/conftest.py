from fractions import Fraction

import pytest

from period_engine.diffop import ThetaOperator

F = Fraction

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def lpf():
    return ThetaOperator.hypergeometric([F(1, 3), F(2, 3)], [1], var="alpha")


@pytest.fixture(scope="session")
def lk3():
    return ThetaOperator.hypergeometric([F(1, 4), F(1, 2), F(3, 4)], [1, 1])


@pytest.fixture(scope="session")
def ltri():
    return ThetaOperator.hypergeometric([F(1, 8), F(3, 8)], [1])


@pytest.fixture(scope="session")
def le8():
    return ThetaOperator.hypergeometric([F(1, 6), F(5, 6)], [1], var="alpha")


@pytest.fixture(scope="session")
def theta2():
    return ThetaOperator([[0], [0], [1]])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)

import pytest

from heatpeak import Converter, Instance


def instance_one() -> Instance:
    # one converter whose first interval is forced by demand
    return Instance(2, [0, 0], [Converter(2, 1, [1, 0], [0, 0, 0], [0, 1, 1], id="a")])


def instance_two() -> Instance:
    conv = Converter(1, 1, [0, 1], [0, 0, 0], [0, 1, 0])
    return Instance(2, [0, 0], [conv, Converter(1, 1, [0, 1], [0, 0, 0], [0, 1, 0], id="b")])


@pytest.fixture
def one() -> Instance:
    return instance_one()


@pytest.fixture
def two() -> Instance:
    return instance_two()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

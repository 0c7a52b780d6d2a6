import dataclasses
import sys

import pytest

from plastoframe.config import fixture_problem, fixture_text


@pytest.fixture(scope="session")
def two_storey():
    return fixture_problem("two_storey")


@pytest.fixture(scope="session")
def five_storey():
    return fixture_problem("five_storey")


@pytest.fixture(scope="session")
def portal():
    return fixture_problem("portal")


def with_ga(problem, **changes):
    return dataclasses.replace(problem, ga=dataclasses.replace(problem.ga, **changes))


def find(mset, kind, level, index=0):
    for i, m in enumerate(mset.mechanisms):
        if (m.kind, m.level, m.index) == (kind, level, index):
            return i
    raise KeyError((kind, level, index))


def bits_for(mset, *picks):
    bits = [0] * len(mset)
    for pick in picks:
        bits[find(mset, *pick)] = 1
    return bits


__all__ = ["with_ga", "find", "bits_for", "fixture_text"]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

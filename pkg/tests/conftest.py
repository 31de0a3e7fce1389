import re

import pytest

from capcyl import geometry as geo

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record a one-line PASS/FAIL for an acceptance criterion, then assert it."""

    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}"
        if detail:
            line += f"  [{detail}]"
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def _criterion_key(line):
    number, suffix = re.search(r"criterion (\d+)(\w*):", line).groups()
    return int(number), suffix


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=_criterion_key):
            terminalreporter.write_line(line)


@pytest.fixture
def unit_cylinder():
    return geo.cylinder_geometry_from_r(1.0)

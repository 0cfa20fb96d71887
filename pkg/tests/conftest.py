import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_results: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one of the numbered acceptance criteria")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = _marks.get(report.nodeid)
    if mark is None:
        return
    number, title = mark
    prev = _results.get(number, ("PASS", title))[0]
    outcome = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
    _results[number] = (outcome, title)


_marks: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _marks[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        outcome, title = _results[number]
        terminalreporter.write_line(f"criterion {number}: {outcome}  {title}")


@pytest.fixture
def two_charge():
    from pistab.central_charge import PolynomialPeriods

    return PolynomialPeriods([[1], [0, 1]])

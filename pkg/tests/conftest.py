import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

_outcomes: dict[int, tuple[str, bool]] = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    number = int(m.group(1))
    title = m.group(2).replace("_", " ")
    if report.when == "call" or report.outcome == "failed":
        prev = _outcomes.get(number, (title, True))[1]
        _outcomes[number] = (title, prev and report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, ok = _outcomes[number]
        terminalreporter.write_line(f"ACCEPTANCE criterion {number} ({title}): {'PASS' if ok else 'FAIL'}")

import re

from helpers import NOTES

_ACCEPTANCE: dict[int, tuple[str, str, float]] = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    m = _NAME.search(report.nodeid)
    if m and "test_acceptance" in report.nodeid:
        n = int(m.group(1))
        status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE[n] = (status, m.group(2).replace("_", " "), report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, what, secs = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {what}  ({secs:.2f}s)")
    for line in NOTES:
        terminalreporter.write_line(f"  note: {line}")

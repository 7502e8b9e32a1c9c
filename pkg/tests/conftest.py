"""Print one PASS/FAIL line per acceptance criterion at the end of the run."""
import re

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.failed:
        detail = dict(report.user_properties).get("detail", "")
        if report.failed and report.longrepr is not None:
            detail = (detail + " | " if detail else "") + str(report.longrepr).strip().splitlines()[-1][:160]
        _CRITERIA[n] = ("PASS" if report.passed else "FAIL", m.group(2), detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, name, detail = _CRITERIA[n]
        terminalreporter.write_line(f"{status} criterion {n:2d} {name}: {detail}")

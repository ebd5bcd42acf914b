import re

from hypothesis import settings

# brute-force oracles are slow by design; examples are bounded per test instead
settings.register_profile("feikit", deadline=None, derandomize=True)
settings.load_profile("feikit")

_results = {}


def pytest_runtest_logreport(report):
    if "acceptance" not in report.keywords:
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        # a failure in any phase sticks
        if _results.get(n) != "FAIL":
            _results[n] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {_results[n]}")

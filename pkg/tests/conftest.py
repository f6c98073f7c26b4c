import re
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or report.when not in ("setup", "call"):
        return
    n = int(m.group(1))
    if report.failed or report.when == "call":
        if n not in _results or _results[n][0] == "PASS":
            _results[n] = ("PASS" if report.passed else "FAIL", m.group(2))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, name = _results[n]
        terminalreporter.write_line(f"criterion {n}: {status}  ({name.replace('_', ' ')})")

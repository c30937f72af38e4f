import os

import pytest

LONG = os.environ.get("PARTLAT_LONG") == "1"

long_only = pytest.mark.skipif(not LONG, reason="long run; set PARTLAT_LONG=1")

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

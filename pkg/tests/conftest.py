import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_KEY = "acceptance_lines"


@pytest.fixture
def record_criterion(request):
    """Store one summary line per acceptance criterion for the terminal report."""
    store = request.config.__dict__.setdefault(_KEY, {})

    def record(number: int, passed: bool, detail: str):
        store[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(store[number])

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.__dict__.get(_KEY)
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(store):
        terminalreporter.write_line(store[k])

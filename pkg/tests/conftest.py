import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


def pytest_configure(config):
    config._acceptance = {}


@pytest.fixture
def record(request):
    """Store one acceptance verdict: record(number, passed, detail)."""
    store = request.config._acceptance

    def _record(number: int, passed: bool, detail: str) -> None:
        store[number] = (bool(passed), detail)
        line = f"ACCEPTANCE {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        with request.config.pluginmanager.getplugin("capturemanager").global_and_fixture_disabled():
            print("\n" + line)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_acceptance", {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        passed, detail = store[number]
        terminalreporter.write_line(f"{number:2d} {'PASS' if passed else 'FAIL'}  {detail}")

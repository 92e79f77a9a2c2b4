"""Shared pytest plumbing.

The acceptance tests record one human-readable verdict line per
criterion; those lines are replayed in the terminal summary so a full
run ends with a compact scoreboard.
"""

import pytest


def pytest_configure(config):
    config._criterion_lines = []


@pytest.fixture(scope="session")
def record_criterion(pytestconfig):
    def _record(name, ok, detail=""):
        verdict = "PASS" if ok else "FAIL"
        line = f"[{verdict}] {name}"
        if detail:
            line += f"  ({detail})"
        pytestconfig._criterion_lines.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)

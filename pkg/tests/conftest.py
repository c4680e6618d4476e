"""Shared pytest plumbing: the acceptance-criteria summary block."""
from __future__ import annotations

from acceptance_log import ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

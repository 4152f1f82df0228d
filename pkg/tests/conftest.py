"""Shared pytest wiring for the suite.

Collects the acceptance gates' PASS/FAIL report lines and replays them
in the terminal summary, where they survive output capture and land in
a plain `pytest -v` log.
"""

REPORT_LINES = []


def pytest_terminal_summary(terminalreporter):
    if REPORT_LINES:
        terminalreporter.section("acceptance gates")
        for line in REPORT_LINES:
            terminalreporter.line(line)

"""Shared pytest plumbing: the acceptance scoreboard.

Acceptance tests record one line per criterion; printing happens in the
terminal summary so the lines survive output capture.
"""

CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(CRITERION_LINES,
                       key=lambda l: int(l.split(":")[0].split()[-1])):
        terminalreporter.write_line(line)

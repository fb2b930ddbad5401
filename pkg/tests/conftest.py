# One verdict line per acceptance criterion, echoed after the test table so
# the gate's outcome survives in captured CI logs.
acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)

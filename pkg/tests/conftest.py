import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # the acceptance module records one line per criterion; replay them after
    # the run so they are visible without -s
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Prints the acceptance criterion report collected during the run."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None) if module else None
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)

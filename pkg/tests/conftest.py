import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

DELTA_PRIME = 0.01

# criterion lines recorded by the acceptance suite, echoed in the summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

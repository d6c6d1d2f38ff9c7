import re
import sys
from pathlib import Path

# tests import shared helpers/oracles as plain modules
sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        match = re.match(r"test_c(\d+)_(.*)", name)
        if not match:
            continue
        number = int(match.group(1))
        label = match.group(2).replace("_", " ")
        outcome = _ACCEPTANCE_RESULTS[name]
        status = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"criterion {number:2d} [{status}]: {label}")

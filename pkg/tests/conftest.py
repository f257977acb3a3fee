import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    outcomes = {}
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            key = (int(m.group(1)), m.group(2))
            if status == "passed" and rep.when == "setup":
                continue
            outcomes[key] = "PASS" if status == "passed" else status.upper().replace("FAILED", "FAIL")
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), verdict in sorted(outcomes.items()):
        terminalreporter.write_line(f"criterion {num} [{verdict}] {name.replace('_', ' ')}")

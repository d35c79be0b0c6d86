from __future__ import annotations

# filled by test_acceptance.py: criterion number -> (status, label, detail)
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, label, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{status} [{k}] {label}: {detail}")

import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (label, passed, detail)."""

    def record(label, passed, detail=""):
        ACCEPTANCE[request.node.name] = (label, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split("_")[1])):
        label, passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")

import pytest

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (passed, detail)."""
    name = request.node.name

    def record(passed, detail=""):
        _CRITERIA.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")

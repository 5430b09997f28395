import pytest

CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, detail)``."""

    def record(ok, detail=""):
        line = f"{request.node.name}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)

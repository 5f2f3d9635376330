import pytest

_ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record a named pass/fail line; the test asserts on the returned flag."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip()
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)

import pytest

_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def _emit(criterion: int, ok: bool, detail: str) -> None:
        line = f"acceptance {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _LINES.append(line)
        assert ok, line

    return _emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)

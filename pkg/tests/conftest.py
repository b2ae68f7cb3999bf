import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """Record ``(number, label, passed, detail)`` for the end-of-run summary."""

    def record(number, label, passed, detail=""):
        prev = _LINES.get(number)
        if prev is not None:
            passed = passed and prev[1]
            detail = f"{prev[2]}; {detail}" if detail else prev[2]
        _LINES[number] = (label, bool(passed), detail)
        print(f"criterion {number} {label}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        label, passed, detail = _LINES[number]
        terminalreporter.write_line(f"criterion {number} {label}: {'PASS' if passed else 'FAIL'} ({detail})")

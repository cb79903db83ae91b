import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion_report():
    """Record one summary line per acceptance criterion; printed at session end."""

    def record(number: int, ok: bool, detail: str, runtime: float):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{runtime:.1f} s]"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

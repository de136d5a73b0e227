import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(number: int, name: str, ok: bool, detail: str) -> None:
        ACCEPTANCE[number] = f"[{'PASS' if ok else 'FAIL'}] {number:2d} {name}: {detail}"
        print(ACCEPTANCE[number])
        assert ok, ACCEPTANCE[number]

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])

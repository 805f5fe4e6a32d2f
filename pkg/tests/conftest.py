import pytest

# (criterion number, description) -> passed; filled in by test_acceptance.py
ACCEPTANCE: dict[tuple[int, str], bool] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, description: str, passed: bool) -> None:
        ACCEPTANCE[number, description] = passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, description), passed in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {description}")

import pytest

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {line}")


@pytest.fixture
def record():
    """record(num, ok, detail) stores a criterion line and asserts it."""
    def _rec(num, ok, detail):
        ACCEPTANCE[num] = (bool(ok), detail)
        assert ok, detail
    return _rec

import pytest

_criteria = {}


@pytest.fixture(scope="session")
def criterion_report():
    """``record(n, ok, detail)`` stores one pass/fail line per acceptance criterion."""

    def record(n, ok, detail):
        _criteria[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_criteria[n])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_criteria):
            terminalreporter.write_line(_criteria[n])

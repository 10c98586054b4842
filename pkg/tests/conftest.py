import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """record(k, title, ok, detail) stores one acceptance line."""

    def _record(k, title, ok, detail=""):
        ACCEPTANCE[k] = (title, bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {k:2d}. {title}  {detail}")

import pytest

from acceptance_log import LOG


def pytest_terminal_summary(terminalreporter):
    if not LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(LOG):
        parts = LOG[number]
        ok = all(p[1] for p in parts)
        title = parts[0][0]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}")
        for _, passed, detail in parts:
            terminalreporter.write_line(f"       {'ok ' if passed else 'BAD'} {detail}")


@pytest.fixture
def record():
    from acceptance_log import record as _record
    return _record

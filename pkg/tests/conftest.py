import time
from contextlib import contextmanager

import pytest

_LINES: dict[int, str] = {}


class _Record:
    detail = ""


@pytest.fixture
def criterion():
    """Time a block against a limit and record one pass/fail line for it."""

    @contextmanager
    def run(number: int, title: str, limit: float):
        rec = _Record()
        start = time.perf_counter()
        try:
            yield rec
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            _LINES[number] = f"FAIL criterion {number}: {title} ({elapsed:.2f}s) {type(exc).__name__}: {exc}"
            print(_LINES[number])
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < limit
        status = "PASS" if ok else "FAIL"
        _LINES[number] = f"{status} criterion {number}: {title} ({elapsed:.2f}s < {limit:g}s) {rec.detail}".rstrip()
        print(_LINES[number])
        assert ok, f"criterion {number} took {elapsed:.2f}s, limit {limit:g}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_LINES):
            terminalreporter.write_line(_LINES[k])

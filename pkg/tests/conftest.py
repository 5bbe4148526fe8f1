"""Shared fixtures: the acceptance-criterion recorder and its end-of-run table."""

from __future__ import annotations

from contextlib import contextmanager
from time import perf_counter

import pytest

_SCOREBOARD: list[str] = []


@contextmanager
def _criterion(num: int, label: str, budget_s: float):
    """Time a criterion body, record one PASS/FAIL line, enforce the budget."""
    start = perf_counter()
    try:
        yield
    except BaseException:
        _SCOREBOARD.append(f"[AC-{num:02d}] {label}: FAIL")
        raise
    elapsed = perf_counter() - start
    if elapsed >= budget_s:
        _SCOREBOARD.append(
            f"[AC-{num:02d}] {label}: FAIL (took {elapsed:.2f}s of {budget_s:.0f}s budget)"
        )
        raise AssertionError(
            f"criterion {num} exceeded its time budget: {elapsed:.2f}s >= {budget_s}s"
        )
    _SCOREBOARD.append(f"[AC-{num:02d}] {label}: PASS ({elapsed:.2f}s)")


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _SCOREBOARD:
        terminalreporter.section("acceptance criteria")
        for line in _SCOREBOARD:
            terminalreporter.write_line(line)

"""Shared fixtures."""

import time

import pytest

from bacs.oracle.registry import run_registry

VERIFY_REPS = 1_000_000


@pytest.fixture(scope="session")
def verify_run():
    """Full registered comparison suite at 10^6 replicates, run once per session."""
    t0 = time.perf_counter()
    records = run_registry(reps=VERIFY_REPS)
    return records, time.perf_counter() - t0


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def record_criterion(request):
    """Record one acceptance verdict line for the terminal summary."""
    store = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number: int, checks: list[tuple[str, bool]]) -> bool:
        ok = all(passed for _, passed in checks)
        failed = [label for label, passed in checks if not passed]
        detail = "all checks met" if ok else "failed: " + "; ".join(failed)
        store[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        terminalreporter.write_line(store[n])

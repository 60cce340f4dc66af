"""Shared fixtures and the acceptance-criteria summary."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "bpeel",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("bpeel")

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config: pytest.Config) -> None:
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def record_criterion(request):
    """Record one PASS/FAIL line per acceptance criterion.

    Lines are echoed immediately (visible with ``-s``) and repeated in a
    dedicated section of the terminal summary.
    """

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        request.config.stash[_ACCEPTANCE].append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240521)

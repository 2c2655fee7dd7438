"""Acceptance gate: every advertised guarantee, one test per criterion.

Each test prints a single PASS/FAIL line with the measured numbers so the
suite output doubles as a report.  The same checks back the CLI's
``selftest`` subcommand.
"""

import pytest

from clarklab import acceptance

CRITERIA = sorted(acceptance._CRITERIA)

BUDGET_SECONDS = {1: 10.0, 2: 30.0, 5: 60.0, 10: 10.0}


@pytest.mark.parametrize("index", CRITERIA)
def test_criterion(index):
    result = acceptance.run_criterion(index)
    mark = "PASS" if result.passed else "FAIL"
    print(f"[{mark}] criterion {result.index}: {result.name} "
          f"({result.seconds:.1f}s) -- {result.detail}")
    assert result.passed, f"criterion {index} failed: {result.detail}"
    budget = BUDGET_SECONDS.get(index)
    if budget is not None:
        assert result.seconds <= budget, (
            f"criterion {index} exceeded its runtime budget: "
            f"{result.seconds:.1f}s > {budget:.0f}s")

"""Acceptance battery at full size: one PASS/FAIL line per criterion."""

import pytest

from bdiv.acceptance import CRITERIA, Battery, run_criterion

BATTERY = Battery()


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = run_criterion(number, BATTERY)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.violations[:5]

"""Acceptance gate: every criterion at its frozen tolerance, one pass/fail
line per criterion (run pytest with -s to watch them stream)."""

import pytest

from affinewalks import acceptance

RESULTS: dict[int, acceptance.CriterionResult] = {}


@pytest.mark.parametrize("number,name,fn", acceptance.CHECKS,
                         ids=[f"criterion-{n:02d}" for n, _, _ in acceptance.CHECKS])
def test_criterion(number, name, fn):
    result = acceptance._timed(number, name, lambda: fn(fast=False))
    RESULTS[number] = result
    print(result.line(), flush=True)
    assert result.passed, result.line()


def test_zz_summary():
    lines = [RESULTS[n].line() for n in sorted(RESULTS)]
    print("\n" + "\n".join(lines), flush=True)
    assert len(RESULTS) == len(acceptance.CHECKS)

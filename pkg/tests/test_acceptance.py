"""Acceptance gate: one test per criterion, each reporting its pass/fail line."""

import pytest

from align_kinetics.acceptance import CRITERIA

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = CRITERIA[number]()
    ACCEPTANCE_LINES.append(result.summary())
    print(result.summary())
    for line in result.lines:
        print(f"    {line}")
    assert result.passed, "\n".join([result.summary(), *result.lines])

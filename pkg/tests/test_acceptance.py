"""The fourteen acceptance criteria at their stated tolerances.

Each criterion prints one [PASS]/[FAIL] line (visible with -s or in the
captured output of a failure) and is asserted as its own test.
"""
import pytest

from minkowski_lab.acceptance import CRITERIA, format_line, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA), ids=[f"{k:02d}-{CRITERIA[k][0]}" for k in sorted(CRITERIA)])
def test_criterion(k, capsys):
    r = run_criterion(k)
    line = format_line(r)
    with capsys.disabled():
        print("\n" + line)
    assert r.passed, line

"""Acceptance suite: one test per criterion, each at its stated tolerance.

The PASS/FAIL line of every criterion is printed in the terminal summary
(and by ``python tests/test_acceptance.py``).
"""

import pytest

from focusjet.acceptance import CRITERIA, run_criterion

SEED = 0
RESULTS = {}


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"{c[0]}-{c[1].replace(' ', '-')}" for c in CRITERIA])
def test_criterion(number):
    res = run_criterion(number, seed=SEED)
    RESULTS[number] = res
    print(res.line())
    assert res.passed, res.line()


if __name__ == "__main__":
    import sys

    lines = [run_criterion(c[0], seed=SEED) for c in CRITERIA]
    for r in lines:
        print(r.line(), f"({r.seconds:.1f}s)")
    sys.exit(0 if all(r.passed for r in lines) else 1)

"""Acceptance criteria 1-9 at their stated tolerances.

Each test prints one PASS/FAIL line with the runtime; run with ``-s`` to
see them.  Criteria that are not met fail here with their measured values.
"""

import json

import pytest

from artifact import acceptance


@pytest.mark.parametrize("k", sorted(acceptance.CRITERIA))
def test_criterion(k):
    fn, _ = acceptance.CRITERIA[k]
    res = fn()
    print()
    print(res.line())
    detail = json.dumps(acceptance._jsonable(res.measured), default=str)
    assert res.passed, f"{res.line()}\nmeasured: {detail}\ntolerance: {res.tolerance}"

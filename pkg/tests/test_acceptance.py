"""Acceptance criteria 1 to 10, exact, with their runtime budgets."""

import time

import pytest

from tanglefloer import verify

# criterion number -> runtime budget in seconds (None when only "seconds" is asked)
BUDGETS = {4: 120, 9: 300, 10: 600}
RESULTS: list[str] = []
FUNCS = {num: (name, fn) for num, name, fn in verify.CRITERIA}


def run_criterion(num, capsys):
    name, fn = FUNCS[num]
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    budget = BUDGETS.get(num)
    in_time = budget is None or elapsed < budget
    line = f"criterion {num} {name}: {'PASS' if ok and in_time else 'FAIL'} ({elapsed:.1f}s)"
    RESULTS.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, detail
    assert in_time, f"took {elapsed:.1f}s, budget {budget}s"


@pytest.mark.parametrize("num", sorted(FUNCS))
def test_criterion(num, capsys):
    run_criterion(num, capsys)

"""Acceptance runner: records, failure reporting and the quick level."""

from tanglefloer import reference, verify


def test_quick_level_passes_structure_and_tables_except_crossings():
    results = {r["criterion"]: r for r in verify.run("quick")}
    assert set(results) == {1, 2, 3, 4}
    assert results[2]["passed"] and results[3]["passed"] and results[4]["passed"]
    assert not results[1]["passed"]
    assert results[1]["detail"]["mismatches"] == [{"P": [-1, 1], "weight": 2}, {"P": [1, -1], "weight": 2}]


def test_only_filters_criteria():
    results = verify.run("quick", only=[3])
    assert [r["criterion"] for r in results] == [3]


def test_mutated_reference_is_reported_with_counterexample(monkeypatch):
    bad = dict(reference.CUP_BLOCKS)
    key = next(iter(bad))
    bad[key] = {k: v * 2 for k, v in bad[key].items()}
    monkeypatch.setattr(reference, "CUP_BLOCKS", bad)
    rec = verify.run("quick", only=[2])[0]
    assert not rec["passed"]
    assert {"cup": list(key), "weight": 0} in rec["detail"]["mismatches"]


def test_crash_becomes_a_failed_record():
    def boom():
        raise ArithmeticError("broken")

    rec = verify._record("demo", boom)
    assert rec["passed"] is False
    assert "broken" in rec["detail"]["error"]


def test_unknown_level():
    try:
        verify.run("medium")
    except ValueError:
        return
    raise AssertionError("expected ValueError")

"""Command line: JSON output and exit codes."""

import json

import pytest

from tanglefloer.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_algebra(capsys):
    code, out = run(capsys, "algebra", "+-")
    assert code == 0 and out["ok"] and out["structure"] == "ok"
    assert out["dimension"] == 34


def test_alexander_named_word(capsys):
    code, out = run(capsys, "alexander", "trefoil")
    assert code == 0
    assert out["alexander"]["text"] == "1*q^-2 + -1 + 1*q^2"


def test_rt_and_k0_agree_after_normalising(capsys):
    _, rt = run(capsys, "rt", "sign:+ -|xe 1")
    _, k0 = run(capsys, "k0", "sign:+ -|xe 1", "--normalize")
    assert rt["matrix"]["text"] == k0["normalized"]["text"]


def test_ct_with_check(capsys):
    code, out = run(capsys, "ct", "sign:+ -|xo 1", "--check")
    assert code == 0 and out["structure"] == "ok"
    assert out["generators"] > 0


def test_hfk_unknot(capsys):
    code, out = run(capsys, "hfk", "unknot")
    assert code == 0 and out["homology"] == [[0, 0, 1]]


def test_ef(capsys):
    code, out = run(capsys, "ef", "+-", "--side", "E")
    assert code == 0 and out["matches_quantum"]


def test_word_file(tmp_path, capsys):
    path = tmp_path / "hopf.tangle"
    path.write_text("sign:\ncap 1 +- ; cap 3 -+ ; xe 2 ; xe 2 ; cup 3 ; cup 1\n")
    code, out = run(capsys, "alexander", str(path))
    assert code == 0 and out["alexander"]["text"] == "-1*q^-1 + 1*q^1"


def test_usage_errors_exit_two(capsys):
    code, out = run(capsys, "alexander", "trefoil", "--max-strands", "2")
    assert code == 2 and "max-strands" in out["error"]
    code, out = run(capsys, "rt", "sign:+ +|cup 1")
    assert code == 2 and "error" in out
    code, out = run(capsys, "hfk", "sign:+ -|xe 1")
    assert code == 2


def test_failed_checks_exit_one(capsys):
    code, out = run(capsys, "verify", "quick", "--only", "1")
    assert code == 1 and not out["ok"]
    code, out = run(capsys, "verify", "quick", "--only", "2", "3")
    assert code == 0 and out["ok"]


def test_text_format(capsys):
    assert main(["algebra", "+", "--format", "text"]) == 0
    assert "structure: \"ok\"" in capsys.readouterr().out


def test_jobs_do_not_change_output(capsys):
    _, one = run(capsys, "k0", "hopf", "--jobs", "1")
    _, many = run(capsys, "k0", "hopf", "--jobs", "4")
    assert one == many


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])


def test_large_closed_word_is_refused(capsys):
    code, out = run(capsys, "ct", "hopf")
    assert code == 2 and "limit" in out["error"]


def test_k0_weight_range(capsys):
    code, out = run(capsys, "k0", "sign:+ -|xe 1", "--weight", "4")
    assert code == 2
    code, out = run(capsys, "k0", "sign:+ -|xe 1", "--weight", "1")
    assert code == 0 and out["raw"]["rows"] == 3

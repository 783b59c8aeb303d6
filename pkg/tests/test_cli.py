from __future__ import annotations

import json
from pathlib import Path

import pytest

from termcat.cli import run

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
MONOID = str(CORPUS / "monoid.msl")
TWOSORTED = str(CORPUS / "twosorted.msl")
UNSOUND = str(CORPUS / "unsound.msl")

ALL_COMMANDS = [
    ["sketch", MONOID],
    ["sketch", TWOSORTED],
    ["compile", "--term", "t1", MONOID],
    ["compile", "--term", "ee", MONOID],
    ["compile", "--term", "fb", TWOSORTED],
    ["check-eq", "--equation", "comm", MONOID],
    ["subst", "--term", "t1", "--var", "y", "--with", "double", MONOID],
    ["check-proof", MONOID],
    ["check-proof", "--proof", "unit_square", MONOID],
    ["check-proof", "--proof", "fetch", TWOSORTED],
    ["normalize-proof", "--proof", "comm_twice", MONOID],
    ["oracle", "--equation", "projl", "--max-size", "2", UNSOUND],
    ["oracle", "--equation", "idem", "--max-size", "2", UNSOUND],
]


def _capture(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, out


def test_sketch_text(capsys):
    code, out = _capture(capsys, ["sketch", MONOID])
    assert code == 0
    assert "(s, s)" in out and "vertex ()" in out


def test_compile_shows_stages(capsys):
    code, out = _capture(capsys, ["compile", "--term", "t1", MONOID])
    assert code == 0
    for label in ("occurrences", "regroup", "apply", "normal form"):
        assert label in out
    assert "m(p1, m(p2, p1))" in out


def test_check_eq_unprovable_without_hypotheses(capsys):
    code, out = _capture(capsys, ["check-eq", "--equation", "comm", MONOID])
    assert code == 1
    assert "formally equal: no" in out


def test_check_eq_reflexive(tmp_path, capsys):
    f = tmp_path / "r.msl"
    f.write_text("sort s\nop m : s s -> s\n"
                 "eq r [x:s, y:s] : m(x, y) = m(x, y)\n")
    code, out = _capture(capsys, ["check-eq", "--equation", "r", str(f)])
    assert code == 0
    assert "formally equal: yes" in out


def test_subst_routes_agree(capsys):
    code, out = _capture(capsys, ["subst", "--term", "t1", "--var", "y",
                                  "--with", "double", MONOID])
    assert code == 0
    assert "arrows equal: yes" in out


def test_check_proof_all_valid(capsys):
    code, out = _capture(capsys, ["check-proof", MONOID])
    assert code == 0
    assert out.count("VALID") == 3


def test_check_proof_json_certificate(capsys):
    code, out = _capture(capsys, ["check-proof", "--proof", "unit_square",
                                  MONOID, "--json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["valid"] is True
    cert = payload["certificate"]
    assert len(cert["hypotheses"]) == 1
    assert len(cert["claims"]) == 1
    assert cert["verification"]


def test_normalize_proof_levels(capsys):
    code, out = _capture(capsys, ["normalize-proof", "--proof",
                                  "comm_twice", MONOID])
    assert code == 0
    assert "level 0" in out and "copy" in out


def test_oracle_counterexample_exit_code(capsys):
    code, out = _capture(capsys, ["oracle", "--equation", "projl",
                                  "--max-size", "2", UNSOUND])
    assert code == 1
    assert "counterexample" in out


def test_oracle_holds_on_tautology(tmp_path, capsys):
    f = tmp_path / "t.msl"
    f.write_text("sort s\nop m : s s -> s\neq r [x:s] : x = x\n")
    code, out = _capture(capsys, ["oracle", "--equation", "r",
                                  "--max-size", "2", str(f)])
    assert code == 0
    assert "holds in all" in out


def test_unknown_names_exit_2(capsys):
    assert run(["compile", "--term", "nope", MONOID]) == 2
    assert run(["check-eq", "--equation", "nope", MONOID]) == 2
    assert run(["check-proof", "--proof", "nope", MONOID]) == 2
    capsys.readouterr()


def test_syntax_error_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.msl"
    f.write_text("op f : s1 -> \n")
    assert run(["sketch", str(f)]) == 2
    capsys.readouterr()


def test_missing_file_exit_2(capsys):
    assert run(["sketch", "/nonexistent/x.msl"]) == 2
    capsys.readouterr()


@pytest.mark.parametrize("argv", ALL_COMMANDS,
                         ids=[" ".join(a[:-1]) or a[0] for a in ALL_COMMANDS])
def test_json_output_is_byte_identical(argv, capsys):
    first_code, first = _capture(capsys, argv + ["--json"])
    second_code, second = _capture(capsys, argv + ["--json"])
    assert first_code == second_code
    assert first == second
    json.loads(first)  # valid JSON (single document per command run)

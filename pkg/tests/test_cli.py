import json

import pytest
from hypothesis import given, settings

from gkzkit import cli
from gkzkit.cli import JobSpec, ParseError, parse_input, serialize

from conftest import fixture_path
from test_gkz import configs


@pytest.mark.parametrize("text, code", [
    ("", "E001"),
    ("# only a comment\n", "E001"),
    ("A r=1 n=1 blocks=2\n1 x\n0 1\n", "E002"),
    ("A r=1 n=1 blocks=2\n1 1 1\n0 1\n", "E003"),
    ("A r=1 n=1 blocks=2\n1 1\n", "E003"),
    ("A r=1 n=1 blocks=2\n1 1\n1 1\n", "E004"),
    ("B 1 2\n", "E005"),
    ("DELTA 1\n0\nDELTA 2\n0 0\n", "E006"),
])
def test_parse_errors(text, code):
    with pytest.raises(ParseError) as info:
        parse_input(text)
    assert info.value.code == code


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_input("A r=1 n=1 blocks=2\n1 1\n0   7q\n")
    assert (info.value.line, info.value.col) == (3, 5)


def test_delta_mode_matches_matrix(ci_r2):
    assert ci_r2.matrix == [[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1], [-1, 0, 1, -1, 0, 1]]


@settings(max_examples=40, deadline=None)
@given(configs())
def test_serialize_roundtrip(c):
    if c is None:
        return
    assert parse_input(serialize(c)) == c


def test_parse_simplices():
    assert cli.parse_simplices("1,2,3;2,3,4") == ((0, 1, 2), (1, 2, 3))
    with pytest.raises(ValueError):
        cli.parse_simplices("0,1")
    with pytest.raises(ValueError):
        cli.parse_simplices(";")


def test_json_deterministic():
    job = JobSpec(fixture_path("hesse"), "verify-main", fmt="json")
    a = cli.format_json(cli.run(job)[1])
    b = cli.format_json(cli.run(job)[1])
    assert a == b
    rep = json.loads(a)
    assert rep["series_count"] == rep["predicted_rank"] == 3
    assert rep["verdicts"]["status"] == "verified"


def test_normalize_report():
    status, rep = cli.run(JobSpec(fixture_path("hesse"), "normalize"))
    assert status == 0
    out = json.loads(cli.format_json(rep))["matrices"]
    assert out["B"] == [["1/3", "2/3"], ["-1/3", "1/3"]]
    assert out["B_inv"] == [[1, -2], [1, 1]]
    assert out["A_prime"] == [[1, 1, 1, 1], [0, 0, 1, -1], [0, -1, 1, 0]]


def test_exit_codes(capsys):
    assert cli.main(["verify-main", fixture_path("hesse")]) == 0
    assert cli.main(["check", fixture_path("boundary")]) == 0
    assert cli.main(["normalize", fixture_path("no_star")]) == 2
    assert cli.main(["check", "/nonexistent/file"]) == 2
    assert cli.main(["bogus", fixture_path("hesse")]) == 2
    assert cli.main(["series", fixture_path("hesse"), "--order", "-1"]) == 2
    assert cli.main(["series", fixture_path("hesse"), "--simplices", "1,2,9"]) == 2
    capsys.readouterr()


def test_verify_main_failure_exit(capsys):
    # a single simplex cannot reach volume 3
    assert cli.main(["verify-main", fixture_path("hesse"), "--simplices", "1,2,3"]) == 1
    capsys.readouterr()


def test_check_boundary_reports_hypothesis(capsys):
    cli.main(["check", fixture_path("boundary"), "--format", "json"])
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdicts"]["hypothesis"] is False


def test_rank_command(capsys):
    assert cli.main(["rank", fixture_path("ci_r2"), "--format", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["predicted_rank"] == 4
    assert rep["matrices"]["rank_one_point"] == [0, 1, 0, 0, 1, 0]


def test_series_with_simplices(capsys):
    assert cli.main(["series", fixture_path("hesse_normalized"), "--simplices", "1,2,3;1,2,4;1,3,4"]) == 0
    out = capsys.readouterr().out
    assert "series_count: 3" in out


def test_no_color(capsys, monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    cli.main(["check", fixture_path("hesse")])
    assert "\033[" not in capsys.readouterr().out
    assert "\033[32m" in cli.format_text({"command": "x", "verdicts": {"ok": True}, "matrices": {},
                                          "series_count": None, "predicted_rank": None, "caveats": []}, True)


def test_box_ops_command(capsys):
    assert cli.main(["box-ops", fixture_path("hesse"), "--degree-bound", "3"]) == 0
    assert "d2*d3*d4 - d1^3" in capsys.readouterr().out

"""Command-line interface: exit codes, output formats, figure rendering.

The full reproduction pipeline is exercised by the acceptance suite; here
we cover the cheap subcommands and the tower report path end to end.
"""

import json

import pytest

from fptower.cli import main, EXIT_MATCH, EXIT_INCONCLUSIVE, EXIT_MISMATCH


def test_enum_small_group(capsys):
    assert main(["enum", "triangle-prime", "x", "y"]) == EXIT_MATCH
    assert capsys.readouterr().out.strip() == "1"


def test_enum_subgroup_index(tmp_path, capsys):
    path = tmp_path / "oct.pres"
    path.write_text("gens: x y\nrel: x^2\nrel: y^3\nrel: (x*y)^4\n")
    assert main(["enum", str(path), "x"]) == EXIT_MATCH
    assert capsys.readouterr().out.strip() == "12"


def test_enum_inconclusive_on_infinite_group(capsys):
    # T is infinite: enumerating the trivial subgroup must hit the limit
    assert main(["enum", "triangle-333", "--limit", "2000"]) == \
        EXIT_INCONCLUSIVE
    assert "inconclusive" in capsys.readouterr().out


def test_enum_missing_presentation():
    with pytest.raises(SystemExit):
        main(["enum", "no-such-presentation"])


def test_abel(capsys):
    assert main(["abel", "triangle-prime"]) == EXIT_MATCH
    assert capsys.readouterr().out.strip() == "[3,3]"
    assert main(["abel", "gamma-bar"]) == EXIT_MATCH
    assert capsys.readouterr().out.strip() == "[3]"


def test_abel_from_file(tmp_path, capsys):
    path = tmp_path / "free.pres"
    path.write_text("gens: x y\n")
    assert main(["abel", str(path)]) == EXIT_MATCH
    assert capsys.readouterr().out.strip() == "[0,0]"


def test_normal3(capsys):
    assert main(["normal3", "triangle-333"]) == EXIT_MATCH
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4
    assert sorted(l.split()[0] for l in lines) == \
        ["[0,0]", "[3,3]", "[3,3]", "[3,3]"]


def test_fingerprint_disagreement_exit_code(capsys):
    code = main(["fingerprint", "triangle-333", "--against", "triangle-prime"])
    assert code == EXIT_MISMATCH
    out = capsys.readouterr().out
    assert "agreement" in out and "False" in out


def test_fingerprint_self_agreement(capsys):
    code = main(["fingerprint", "triangle-333", "--against", "triangle-333"])
    assert code == EXIT_MATCH


def test_tower_markdown(capsys):
    assert main(["tower", "--levels", "5"]) == EXIT_MATCH
    out = capsys.readouterr().out
    assert out.count("\n") == 7                 # header, rule, 5 rows
    assert "| 3 | 27 | 5 | 81 | 9 | 0 | 0 | 27/5 |" in out


def test_tower_json(capsys):
    assert main(["tower", "--levels", "3", "--format", "json"]) == EXIT_MATCH
    data = json.loads(capsys.readouterr().out)
    assert [row["level"] for row in data["levels"]] == [1, 2, 3]
    assert data["levels"][2]["ratio"] == "27/5"
    assert data["levels"][2]["residual_min_model"] == 0


def test_tower_report_directory(tmp_path, capsys):
    out = tmp_path / "report"
    assert main(["tower", "--levels", "12", "--format", "csv",
                 "--out", str(out)]) == EXIT_MATCH
    assert (out / "tower.csv").exists()
    # figures are rendered alongside the delimited output
    assert (out / "ratio-convergence.png").stat().st_size > 0
    assert (out / "tower-lines.png").stat().st_size > 0
    header = (out / "tower.csv").read_text().splitlines()[0]
    assert header.startswith("level,")


def test_tower_csv_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["tower", "--levels", "8", "--format", "csv", "--out", str(a)])
    main(["tower", "--levels", "8", "--format", "csv", "--out", str(b)])
    assert (a / "tower.csv").read_bytes() == (b / "tower.csv").read_bytes()

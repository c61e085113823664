import csv
import io
import json

import pytest

from artifact.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, format_float, main, to_json


def run_json(capsys, *args):
    code = main(list(args) + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def run_csv(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, list(csv.DictReader(io.StringIO(out)))


def test_float_formatting():
    assert float(format_float(0.1)) == 0.1
    assert json.loads(to_json({"x": float("nan"), "y": 1 / 3}))["x"] is None
    assert json.loads(to_json({"y": 1 / 3}))["y"] == 1 / 3


def test_spectrum_all_sectors(capsys):
    code, rows = run_csv(capsys, "spectrum", "--M", "8", "--sectors", "all")
    assert code == EXIT_OK
    ed = [r for r in rows if r["method"] == "exact-diag"]
    assert sum(int(r["multiplicity"]) for r in ed) == 256
    bethe_rows = [r for r in rows if r["method"] == "bethe"]
    assert bethe_rows and all(float(r["dE"]) < 1e-9 for r in bethe_rows)


def test_spectrum_ground(capsys):
    code, doc = run_json(capsys, "spectrum", "--M", "4", "--no-oracle")
    assert code == EXIT_OK and doc["command"] == "spectrum"
    (row,) = [r for r in doc["rows"] if r["s"] == 0]
    assert abs(row["E"] + 12) < 1e-12


def test_spectrum_holes(capsys):
    code, doc = run_json(capsys, "spectrum", "--M", "8", "--holes", "", "--no-oracle")
    assert code == EXIT_OK
    assert len(doc["rows"]) == 1 and doc["rows"][0]["s"] == 0
    code, doc = run_json(capsys, "spectrum", "--M", "8", "--holes=-1,2")
    assert code == EXIT_OK
    assert any(r["method"] == "bethe" and r["s"] == 1 for r in doc["rows"])


def test_formfactor_compare(capsys):
    code, doc = run_json(capsys, "formfactor", "--M", "8", "--spinons", "2", "--compare", "oracle")
    assert code == EXIT_OK
    gaps = [r["rel_gap"] for r in doc["rows"] if r["method"] == "exact-diag" and r["rel_gap"] is not None]
    assert gaps and max(gaps) < 1e-8


def test_formfactor_usage_errors(capsys):
    assert main(["formfactor", "--M", "8", "--spinons", "3"]) == EXIT_USAGE
    assert main(["spectrum", "--M", "7"]) == EXIT_USAGE
    capsys.readouterr()


def test_formfactor_thermo(capsys):
    code, doc = run_json(capsys, "formfactor", "--thermo", "--holes", "0.3,0.7")
    assert code == EXIT_OK
    methods = {r["method"]: r for r in doc["rows"]}
    assert set(methods) == {"thermo-2spinon", "integral-I"}
    assert methods["integral-I"]["value"] == pytest.approx(methods["thermo-2spinon"]["value"], rel=1e-8)


def test_scaling(capsys):
    code, rows = run_csv(capsys, "scaling", "--M", "32", "--holes=-0.4,0.4")
    assert code == EXIT_OK
    assert [r["method"] for r in rows] == ["finite-determinant", "thermo-2spinon"]
    assert main(["scaling", "--M", "32", "--holes", "0.4"]) == EXIT_USAGE
    assert main(["scaling", "--M", "64,32", "--holes=-0.4,0.4"]) == EXIT_USAGE
    capsys.readouterr()


def test_output_file(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--M", "6", "--no-oracle", "-o", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert out.read_text().startswith("M,")


def test_verify_exit_codes(capsys):
    assert main(["verify", "--only", "5"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    assert main(["verify", "--only", "nosuch"]) == EXIT_USAGE
    capsys.readouterr()


def test_verify_report_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "--only", "7", "--seed", "3", "--report", str(a)])
    main(["verify", "--only", "7", "--seed", "3", "--report", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["seed"] == 3 and [c["id"] for c in doc["checks"]] == [7]


def test_verify_failure_exit(capsys):
    # the seed-0 determinant population contains a draw at the rounding floor
    assert main(["verify", "--only", "cvlinalg"]) == EXIT_FAIL
    capsys.readouterr()

import json

import jsonschema
import pytest

from tyzlab.cli import EXIT_CONTRADICTION, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run
from tyzlab.exactpoly import Polynomial
from tyzlab.report import REPORT_SCHEMA


@pytest.fixture
def potential(tmp_path):
    def write(text, vars_=("x",)):
        path = tmp_path / f"F{len(list(tmp_path.iterdir()))}.json"
        path.write_text(json.dumps(Polynomial.parse(text, vars_).to_json()))
        return str(path)
    return write


def report_of(tmp_path, argv):
    out = tmp_path / "report.json"
    code = run(argv + ["--report", str(out)])
    data = json.loads(out.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    return code, data, out.read_bytes()


def test_polytope_points(tmp_path):
    poly = tmp_path / "hex.json"
    poly.write_text(json.dumps({"dim": 2, "inequalities": [
        {"normal": [-1, 0], "bound": 0}, {"normal": [0, -1], "bound": 0}, {"normal": [1, 0], "bound": 2},
        {"normal": [0, 1], "bound": 2}, {"normal": [1, -1], "bound": 1}, {"normal": [-1, 1], "bound": 1}]}))
    code, data, _ = report_of(tmp_path, ["polytope", "points", "--file", str(poly)])
    assert code == EXIT_OK and data["results"]["count"] == 7


def test_curvature_report(tmp_path, potential):
    code, data, _ = report_of(tmp_path, ["curvature", "--potential", potential("1 + x")])
    assert code == EXIT_OK
    assert data["results"]["einstein_constant"] == "2/1"
    assert data["provenance"]["conventions"]["kappa"] == "1/1"


@pytest.mark.parametrize("case,expected", [("dp6", EXIT_CONTRADICTION), ("dim3", EXIT_FAILURE)])
def test_ke_check_exit_codes(tmp_path, case, expected):
    code, data, _ = report_of(tmp_path, ["ke-check", "--case", case])
    assert code == expected
    assert data["status"] == ("contradiction-certified" if expected == EXIT_CONTRADICTION else "diverged")
    assert data["results"]["certificate"]["case"] == case


def test_ke_check_non_strict(tmp_path):
    code, data, _ = report_of(tmp_path, ["ke-check", "--case", "dim3", "--non-strict"])
    assert code == EXIT_CONTRADICTION
    assert data["results"]["certificate"]["discrepancies"]


def test_lbs_report(tmp_path):
    code, data, _ = report_of(tmp_path, ["lbs", "--dim", "2"])
    assert code == EXIT_OK
    assert data["results"]["primary"]["coefficients"]["defect"] == "0/1"


def test_distortion_report_and_fit(tmp_path, potential):
    code, data, _ = report_of(tmp_path, ["distortion", "--potential", potential("1 + x"), "--m", "1..6"])
    assert code == EXIT_OK
    assert all(level["constant"] for level in data["results"]["levels"])
    assert data["results"]["tyz_fit"]["within_tolerance"]
    assert data["provenance"]["conventions"]["gamma"] is not None


def test_reports_are_byte_identical(tmp_path, potential):
    argv = ["distortion", "--potential", potential("1 + x + x^2"), "--balance"]
    first = report_of(tmp_path, argv)[2]
    second = report_of(tmp_path, argv)[2]
    assert first == second


@pytest.mark.parametrize("argv", [["bogus"], ["ke-check", "--case", "nope"], ["curvature", "--potential",
                                  "/no/such/file.json"], ["lbs", "--dim", "12"], []])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE


def test_failed_report_on_bad_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "r.json"
    assert run(["curvature", "--potential", str(bad), "--report", str(out)]) == EXIT_FAILURE
    data = json.loads(out.read_text())
    assert data["status"] == "failed" and "error" in data


def test_print_schema(capsys):
    assert run(["--print-schema"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["title"] == "tyzlab report"

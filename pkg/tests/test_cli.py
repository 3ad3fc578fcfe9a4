import json
import math

import pytest

from app import main
from src import cli
from src.cli import parse_t_grid, to_json
from src.errors import MalformedSpec


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def error_record(err):
    lines = [line for line in err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


def test_expand_linear(capsys):
    code, out, _ = run(capsys, "expand", "--catalog", "linear_n", "--strips", "3")
    assert code == 0
    record = json.loads(out)
    assert record["classification"]["kind"] == "Exact"
    assert record["classification"]["T"] == pytest.approx(2 * math.pi)
    assert [s["terms"][0]["exact"][0] for s in record["strips"]] == ["1", "-1/2", "1/12"]
    assert record["strips"][0]["terms"][0]["s0"] == [1, 0]


def test_expand_without_continuation_exits_with_two(capsys):
    code, out, _ = run(capsys, "expand", "--catalog", "lacunary_gauss")
    assert code == 2
    record = json.loads(out)
    assert record["classification"]["kind"] == "NoContinuation"
    assert "sqrt(-log t)" in record["tauberian"]["leading_order"]["leading"]
    assert record["tauberian"]["lacunary"]["lacunary"] is True


def test_verify_within_tolerance(capsys):
    code, out, _ = run(capsys, "verify", "--catalog", "linear_n", "--strips", "5", "--t", "0.1", "0.5",
                       "--tol", "1e-6")
    assert code == 0
    record = json.loads(out)
    assert record["violations"] == []
    assert [row["t"] for row in record["rows"]] == [0.1, 0.5]


def test_verify_reports_violations(capsys):
    code, out, _ = run(capsys, "verify", "--catalog", "linear_n", "--strips", "5", "--t", "3", "--tol", "1e-12")
    assert code == 1
    assert json.loads(out)["violations"] == [3]


def test_classify_theta(capsys):
    code, out, _ = run(capsys, "classify", "--catalog", "theta_operator")
    assert code == 0
    classification = json.loads(out)["classification"]
    assert classification["kind"] == "AlmostExact"
    assert classification["T"] == "inf"
    assert classification["remainder"]["type"] == "JacobiRemainder"
    assert classification["remainder"]["theta"] == "theta3"


def test_classify_spec_file(capsys, tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"kind": "polynomial", "A": [0, 1], "B": [1], "n_start": 1}))
    code, out, _ = run(capsys, "classify", "--spec", str(path))
    assert code == 0
    assert json.loads(out)["classification"]["kind"] == "Exact"


def test_malformed_spec_file(capsys, tmp_path):
    path = tmp_path / "spec.json"
    path.write_text("{not json")
    code, out, err = run(capsys, "classify", "--spec", str(path))
    assert code == 1
    assert out == ""
    record = error_record(err)
    assert record["error"] == "MalformedSpec"
    assert record["field"] == "spec"


def test_radius(capsys):
    code, out, _ = run(capsys, "radius", "--catalog", "linear_n")
    assert code == 0
    record = json.loads(out)
    assert record["analytic"] == pytest.approx(2 * math.pi)
    assert len(record["bounds"]) >= 8


def test_specfun_exact_value(capsys):
    code, out, _ = run(capsys, "specfun", "zeta", "-1")
    assert code == 0
    record = json.loads(out)
    assert record["exact"] == "-1/12"
    assert record["value"] == pytest.approx(-1 / 12)


def test_specfun_pole(capsys):
    code, _, err = run(capsys, "specfun", "zeta", "1")
    assert code == 1
    assert error_record(err)["error"] == "PoleAt"


def test_specfun_hurwitz(capsys):
    code, out, _ = run(capsys, "specfun", "hurwitz", "-1", "3/2")
    assert code == 0
    assert json.loads(out)["exact"] == "-11/24"


def test_poles(capsys):
    code, out, _ = run(capsys, "poles", "--catalog", "linear_n", "--r-max", "4")
    assert code == 0
    record = json.loads(out)
    assert record["poles"][0]["s0_re"] == 1
    assert 2 in record["cancelled"]


def test_tauberian(capsys):
    code, out, _ = run(capsys, "tauberian", "--catalog", "pow2_pow2")
    assert code == 0
    report = json.loads(out)["leading_order"]
    assert report["slow_variation_ok"] is False


def test_catalog_list_and_show(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    names = [entry["name"] for entry in json.loads(out)["entries"]]
    assert "sphere_absD" in names and "lacunary_gauss" in names

    code, out, _ = run(capsys, "catalog", "show", "sphere_Dpow(2, 2)")
    assert code == 0
    record = json.loads(out)
    assert record["name"] == "sphere_Dpow:2,2"
    assert record["expected"]["classification"] == "Divergent"
    assert record["spec"]["kind"] == "polynomial"


def test_unknown_catalog_name(capsys):
    code, _, err = run(capsys, "catalog", "show", "no_such_entry")
    assert code == 1
    assert error_record(err)["error"] == "UnknownName"


def test_csv_output_to_file(capsys, tmp_path):
    path = tmp_path / "terms.csv"
    code, out, _ = run(capsys, "expand", "--catalog", "linear_n", "--strips", "3", "--format", "csv",
                       "--out", str(path))
    assert code == 0
    assert out == ""
    lines = path.read_text().splitlines()
    assert lines[0] == "strip,s0_re,s0_im,log_power,coeff_re,coeff_im,provenance,exact"
    assert len(lines) == 4


@pytest.mark.parametrize("argv, field", [
    (["expand", "--catalog", "linear_n", "--strips", "0"], "strips"),
    (["verify", "--catalog", "linear_n", "--t", "-1"], "t"),
    (["expand", "--catalog", "linear_n", "--t-grid", "1:0.1:3"], "t_grid"),
    (["expand"], "spec"),
    (["frobnicate"], "argv"),
])
def test_bad_arguments(capsys, argv, field):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert error_record(err)["field"] == field


def test_t_grid():
    grid = parse_t_grid("0.01:1:3")
    assert grid.values() == pytest.approx([0.01, 0.1, 1.0])
    assert parse_t_grid("1:3:3:lin").values() == pytest.approx([1.0, 2.0, 3.0])
    with pytest.raises(MalformedSpec):
        parse_t_grid("1:2")


def test_json_numbers():
    assert to_json({"x": 0.1, "y": float("inf"), "z": float("nan")}) == '{"x": 0.10000000000000001, "y": "inf", "z": null}'
    assert json.loads(to_json([complex(1, -2)])) == [[1, -2]]


def test_unexpected_failure_is_reported_as_a_record(capsys, monkeypatch):
    def broken(args, cfg):
        raise RuntimeError("numerical breakdown")

    monkeypatch.setitem(cli.COMMANDS, "classify", broken)
    code, out, err = run(capsys, "classify", "--catalog", "linear_n")
    assert code == 1
    assert out == ""
    record = error_record(err)
    assert record == {"error": "RuntimeError", "message": "numerical breakdown", "field": None}


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--catalog", "circle_nontrivial_spin", "--lambda", "3.6", "1/4")
    assert code == 0
    assert json.loads(out)["points"] == [{"lambda": "18/5", "count": "8"}, {"lambda": "1/4", "count": "0"}]


def test_count_csv(capsys):
    code, out, _ = run(capsys, "count", "--catalog", "pow2_pow2", "--lambda", "10", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["lambda,count", "10,15"]


def test_shifted_exponential_has_no_continuation(capsys, tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"kind": "exponential", "q": "1/2", "shift": 1}))
    code, out, _ = run(capsys, "classify", "--spec", str(path))
    assert code == 2
    record = json.loads(out)
    assert record["classification"]["kind"] == "NoContinuation"
    assert "shift" in record["classification"]["evidence"]["reason"]

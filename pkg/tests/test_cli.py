import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fourbessel.cli import SWEEP_COLUMNS, main, parse_tau_list, write_csv

HALF = ["--mu", "0", "--alpha", "0.5", "--beta", "0.5", "--gamma", "0.5", "--delta", "0.5"]
REF = ["--mu", "-0.5", "--alpha", "0.25", "--beta", "1.5", "--gamma", "0.5", "--delta", "2.5"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_golden(capsys):
    code, out, _ = run(capsys, "eval", *HALF, "--a", "2", "--b", "1")
    assert code == 0
    fields = dict(kv.split("=") for kv in out.split())
    assert float(fields["value"]) == pytest.approx(0.159154943, rel=1e-8)
    assert fields["branch"] == "TauBelowOne" and fields["method"] == "ClosedForm"


def test_eval_tau_flag(capsys):
    code, out, _ = run(capsys, "eval", *HALF, "--tau", "3")
    assert code == 0 and "branch=TauAboveOne" in out
    assert float(out.split()[0].split("=")[1]) == pytest.approx(1 / (3 * math.pi), rel=1e-8)


def test_eval_mu_too_large(capsys):
    code, _, err = run(capsys, "eval", "--mu", "3", "--alpha", "0.5", "--beta", "0.5",
                       "--gamma", "0.5", "--delta", "0.5", "--b", "2")
    assert code == 2 and "mu < 2" in err


def test_eval_resonance(capsys):
    code, _, err = run(capsys, "eval", *HALF, "--a", "1", "--b", "1")
    assert code == 2 and "Resonance" in err


def test_eval_degenerate(capsys):
    code, _, err = run(capsys, "eval", "--mu", "0", "--alpha", "1", "--beta", "1", "--gamma", "1",
                       "--delta", "1", "--b", "0.5")
    assert code == 2 and "Degenerate" in err


def test_eval_bad_scale(capsys):
    code, _, _ = run(capsys, "eval", *HALF, "--a", "-1")
    assert code == 2


def test_eval_usage_error(capsys):
    code, _, _ = run(capsys, "eval", "--mu", "0")
    assert code == 2


def test_eval_numerical_failure_exit_code(capsys, monkeypatch):
    from fourbessel import cli
    from fourbessel.errors import NoConvergence

    def boom(*args, **kwargs):
        raise NoConvergence("forced")

    monkeypatch.setattr(cli, "evaluate", boom)
    code, _, err = run(capsys, "eval", *HALF, "--b", "2")
    assert code == 3 and "NoConvergence" in err


def test_eval_json_fields(capsys):
    code, out, _ = run(capsys, "eval", *REF, "--b", "0.8", "--json")
    assert code == 0
    obj = json.loads(out)
    assert set(obj) == {"request", "value", "abs_err_est", "method", "branch", "diagnostics"}
    assert obj["request"] == {"mu": -0.5, "alpha": 0.25, "beta": 1.5, "gamma": 0.5, "delta": 2.5, "a": 1.0, "b": 0.8}
    assert obj["value"] == pytest.approx(0.01263913469342559, rel=1e-11)


def test_eval_all_methods(capsys):
    code, out, _ = run(capsys, "eval", *REF, "--b", "0.8", "--method", "all")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 5
    assert [l.split()[2] for l in lines[:4]] == [
        "method=ClosedForm", "method=ContourQuad", "method=ResidueSeries", "method=Oracle"]
    assert float(lines[-1].split("=")[1]) < 1e-12


def test_eval_all_skips_oracle_above_limit(capsys):
    code, out, _ = run(capsys, "eval", "--mu", "0.95", "--alpha", "0.25", "--beta", "1.5",
                       "--gamma", "0.5", "--delta", "2.5", "--b", "0.5", "--method", "all")
    assert code == 0 and "method=oracle skipped" in out


def test_sweep_half_order_constant(capsys):
    code, out, _ = run(capsys, "sweep", *HALF, "--tau", "0.1:0.9:9")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    assert out.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    for row in rows:
        assert float(row["value"]) == pytest.approx(1 / math.pi, rel=1e-8)
        assert row["error"] == ""


def test_sweep_resonance_rows_and_order(capsys):
    code, out, _ = run(capsys, "sweep", *REF, "--tau", "2,1.0005,0.5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [float(r["tau"]) for r in rows] == [0.5, 1.0005, 2.0]
    assert rows[1]["error"] == "resonance-band" and rows[1]["value"] == ""


def test_sweep_all_rows_fail(capsys):
    code, _, _ = run(capsys, "sweep", *REF, "--tau", "0.9995,1.0")
    assert code == 3


def test_sweep_all_methods_deviation_column(capsys):
    code, out, _ = run(capsys, "sweep", *REF, "--tau", "0.5,2", "--method", "all")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 8
    for r in rows:
        tol = 2 * max(float(x["abs_err_est"]) for x in rows if x["tau"] == r["tau"])
        assert float(r["max_deviation"]) <= tol + 1e-7 * abs(float(r["value"]))


def test_sweep_invalid_parameters(capsys):
    code, _, err = run(capsys, "sweep", "--mu", "2.5", "--alpha", "0.5", "--beta", "0.5",
                       "--gamma", "0.5", "--delta", "0.5", "--tau", "0.5")
    assert code == 2 and "mu < 2" in err


def test_csv_round_trip(capsys):
    _, out, _ = run(capsys, "sweep", *REF, "--tau", "0.3,0.7,1.0,1.6", "--method", "all")
    rows = list(csv.reader(io.StringIO(out)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    assert buf.getvalue() == out


def test_numbers_round_trip_exactly(capsys):
    _, out, _ = run(capsys, "eval", *REF, "--b", "0.8")
    text = out.split()[0].split("=")[1]
    assert text == format(float(text), ".17g")
    assert float(text) == pytest.approx(0.01263913469342559, rel=1e-11)


def test_write_csv_fills_missing():
    buf = io.StringIO()
    write_csv([{"tau": "0.5"}], ["tau", "value"], buf)
    assert buf.getvalue() == "tau,value\n0.5,\n"


@pytest.mark.parametrize("text, expected", [
    ("0.5,0.25", [0.25, 0.5]), ("1:2:3", [1.0, 1.5, 2.0]), ("3:3:1", [3.0]),
])
def test_parse_tau_list(text, expected):
    assert parse_tau_list(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["", "1:2", "0.5,-1", "1:2:0"])
def test_parse_tau_list_rejects(text):
    with pytest.raises(ValueError):
        parse_tau_list(text)


def test_crosscheck_small_grid(tmp_path, capsys):
    grid = tmp_path / "g.grid"
    grid.write_text("mu = -0.5, 0\nalpha = 0.25\nbeta = 1.5\ngamma = 0.5, 1\ndelta = 1\ntau = 0.5, 2\n")
    report = tmp_path / "r.csv"
    code, out, _ = run(capsys, "crosscheck", str(grid), "--report", str(report))
    rows = list(csv.DictReader(report.open()))
    assert code == 0 and len(rows) == 8
    statuses = {(float(r["mu"]), float(r["gamma"])): r["status"] for r in rows}
    # mu = 0 with gamma = delta = 1 is the documented degenerate point; mu = -0.5 with
    # gamma + delta = 1.5 collides the (mu-1)/2 and -(gamma+delta)/2 families
    assert statuses[(0.0, 1.0)] == statuses[(-0.5, 0.5)] == "skipped: degenerate"
    assert "fail 0" in out and "skipped-degenerate 4" in out


def test_crosscheck_malformed_grid(tmp_path, capsys):
    grid = tmp_path / "bad.grid"
    grid.write_text("mu = 0\nalpha = oops\n")
    code, _, err = run(capsys, "crosscheck", str(grid))
    assert code == 2 and "line 2" in err


def test_crosscheck_empty_grid(tmp_path, capsys):
    grid = tmp_path / "empty.grid"
    grid.write_text("# nothing\n")
    code, _, _ = run(capsys, "crosscheck", str(grid))
    assert code == 2


def test_crosscheck_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "crosscheck", str(tmp_path / "nope.grid"))
    assert code == 2 and "cannot read" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fourbessel", "eval", *HALF, "--a", "2", "--b", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("value=0.1591549430918")

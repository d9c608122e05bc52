import csv
import io
import json
import subprocess
import sys

import pytest

from ringmarket import cli
from ringmarket.cli import EXIT_CONFIG, EXIT_OK, EXIT_OUTPUT, EXIT_SOLVER, EXIT_VALIDATION, main
from ringmarket.equilibrium import SolverError
from ringmarket.reports import SUITE_COLUMNS
from ringmarket.validation import Check

SMALL = ["--q-grid", "60:100:10", "--p-grid", "100:115:0.4166666666666667"]


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_json_to_stdout(capsys):
    assert main(["run", *SMALL]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["tax"]["kind"] == "none"
    assert doc["result"]["kind"] in ("pure", "mixed_price", "mixed_quantity")
    assert set(doc["result"]) >= {"quantities", "prices", "profits", "revenues", "diagnostics"}


def test_run_csv_untaxed_matches_cournot(tmp_path):
    out = tmp_path / "run.csv"
    assert main(["run", "--tax", "none", "--output", str(out), *SMALL]) == EXIT_OK
    [row] = rows(out.read_text())
    assert (row["q1"], row["q2"], row["profit1"]) == ("80.000000", "80.000000", "533.333333")
    assert row["equilibrium_kind"] == "pure" and row["flags"] == ""


def test_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tax": {"kind": "ordinal", "lambda": 0.3}, "firms": [
        {"position": 0.0, "cost": 100}, {"position": 0.5, "cost": 100}]}))
    assert main(["run", "--config", str(cfg), "--costs", "99,100", "--format", "csv", *SMALL]) == EXIT_OK
    [row] = rows(capsys.readouterr().out)
    assert row["tax_kind"] == "ordinal" and row["c1"] == "99.000000"


def test_lambda_zero_reports_match_untaxed(capsys):
    results = []
    for args in (["--tax", "none"], ["--tax", "cardinal", "--lambda", "0"], ["--tax", "ordinal", "--lambda", "0"]):
        assert main(["run", *args, *SMALL]) == EXIT_OK
        results.append(json.loads(capsys.readouterr().out)["result"])
    assert results[0] == results[1] == results[2]


def test_suite_csv(tmp_path):
    out = tmp_path / "suite.csv"
    assert main(["suite", "--output", str(out), *SMALL]) == EXIT_OK
    table = rows(out.read_text())
    assert len(table) == 9
    assert table[0]["label"] == "none_c100-100" and table[0]["revenue_normalized"] == "1.000000"
    assert list(table[0]) == list(SUITE_COLUMNS)


def test_validate_passes(capsys):
    assert main(["validate", *SMALL]) == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passed"] is True
    assert "PASS cournot_benchmark" in captured.err


def test_validate_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_checks", lambda *a, **k: [Check("ok", True, ""), Check("broken", False, "x")])
    assert main(["validate", "--format", "csv"]) == EXIT_VALIDATION
    assert "FAIL broken" in capsys.readouterr().err


def test_solver_error_exit_code(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise SolverError("no equilibrium at q=(5, 5)")

    monkeypatch.setattr(cli, "solve_two_stage", boom)
    assert main(["run"]) == EXIT_SOLVER
    assert "q=(5, 5)" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["run", "--q-grid", "0:10"],
        ["run", "--p-grid", "a:b:c"],
        ["run", "--costs", "1,x"],
        ["run", "--threads", "0"],
        ["run", "--output", "x.csv", "--format", "json"],
        ["run", "--lambda", "-1"],
        ["run", "--costs", "1,2,3"],
        ["run", "--q-grid", "10:0:5"],
        ["run", "--config", "/nonexistent/cfg.json"],
    ],
)
def test_usage_and_config_errors(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "ringmarket" in capsys.readouterr().err


def test_malformed_config_names_path(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"tax": {"kind": "cardinal", "lambda": "lots"}}')
    assert main(["run", "--config", str(cfg)]) == EXIT_CONFIG
    assert "tax.lambda" in capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    out = tmp_path / "missing" / "run.json"
    assert main(["run", "--output", str(out), *SMALL]) == EXIT_OUTPUT
    assert "cannot write" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ringmarket", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "run" in proc.stdout

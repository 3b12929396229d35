import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brokenstick.cli import RECORD_COLUMNS, TABLE_COLUMNS, decimal_string, load_schema, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_process(*argv, env=None):
    return subprocess.run(
        [sys.executable, "-m", "brokenstick", *argv],
        capture_output=True, text=True, env={**os.environ, **(env or {})},
    )


@pytest.fixture(scope="module")
def validator():
    schema = load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def test_exact_json(capsys, validator):
    code, out, _ = run(["exact", "--problem", "none", "-k", "3", "-n", "4", "--format", "json"], capsys)
    assert code == 0
    rec = json.loads(out)
    validator.validate(rec)
    assert (rec["num"], rec["den"], rec["decimal"]) == ("3", "7", "0.428571428571429")


def test_exact_random_subset(capsys):
    code, out, _ = run(["exact", "--problem", "random_subset", "-k", "4", "-n", "100", "--format", "json"], capsys)
    rec = json.loads(out)
    assert code == 0 and (rec["num"], rec["den"]) == ("1", "2")


@pytest.mark.parametrize("argv", [
    ["exact", "--problem", "none", "-k", "3", "-n", "2"],
    ["exact", "--problem", "none", "-k", "2", "-n", "5"],
    ["exact", "--problem", "sometimes", "-k", "3", "-n", "4"],
    ["exact", "-k", "3"],
    ["simulate", "-k", "3", "-n", "4", "--trials", "0"],
    ["simulate", "-k", "3", "-n", "4", "--seed", "-1"],
    ["table", "--k-max", "5", "--n-max", "4"],
    ["reconcile"],
    ["reconcile", "-k", "5", "-n", "4"],
    ["frobnicate"],
])
def test_argument_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc_info:
        code = main(argv)
        raise SystemExit(code)
    assert exc_info.value.code == 2
    _, err = capsys.readouterr()
    assert err


def test_exit_code_and_stderr_in_subprocess():
    proc = run_process("exact", "--problem", "none", "-k", "3", "-n", "2")
    assert proc.returncode == 2
    assert proc.stdout == ""
    assert "k must not exceed n" in proc.stderr


def test_mode_both(capsys, validator):
    code, out, _ = run(["exact", "-k", "196", "-n", "200", "--mode", "both", "--format", "json"], capsys)
    rec = json.loads(out)
    validator.validate(rec)
    assert rec["rel_diff"] <= 1e-9
    assert Fraction(int(rec["num"]), int(rec["den"])) > 0


def test_mode_float_underflow(capsys, validator):
    code, out, _ = run(["exact", "-k", "3", "-n", "300", "--mode", "float", "--format", "json"], capsys)
    rec = json.loads(out)
    validator.validate(rec)
    assert rec["float"] == 0.0 and rec["log_value"] < -700
    assert "num" not in rec


def test_csv_record_header(capsys):
    code, out, _ = run(["exact", "--problem", "expected_bad", "-k", "4", "-n", "6", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == RECORD_COLUMNS
    assert (rows[0]["num"], rows[0]["den"], rows[0]["decimal"]) == ("15", "2", "7.5")


def test_plain_output(capsys):
    code, out, _ = run(["exact", "-k", "5", "-n", "5"], capsys)
    assert out.strip() == "problem=none k=5 n=5 num=5 den=16 decimal=0.3125"


def test_table_single_cell(capsys):
    code, out, _ = run(["table", "--k-max", "3", "--n-max", "3"], capsys)
    lines = out.splitlines()
    assert lines[0] == ",".join(TABLE_COLUMNS)
    assert len(lines) == 6


def test_table_rows(capsys):
    code, out, _ = run(["table", "--k-max", "6", "--n-max", "8"], capsys)
    rows = {(r["problem"], int(r["k"]), int(r["n"])): r for r in csv.DictReader(io.StringIO(out))}
    assert len(rows) == 5 * sum(min(n, 6) - 2 for n in range(3, 9))
    assert (rows[("none", 5, 5)]["num"], rows[("none", 5, 5)]["den"]) == ("5", "16")
    assert (rows[("expected_bad", 4, 6)]["num"], rows[("expected_bad", 4, 6)]["den"]) == ("15", "2")


@given(st.integers(-10**40, 10**40), st.integers(1, 10**40))
def test_decimal_round_trip(num, den):
    value = Fraction(num, den)
    text = decimal_string(value)
    assert decimal_string(Fraction(value.numerator, value.denominator)) == text
    if value:
        assert abs(float(text) - float(value)) <= 1e-14 * abs(float(value))


def test_decimal_rounding():
    assert decimal_string(Fraction(2, 3)) == "0.666666666666667"
    assert decimal_string(Fraction(3, 4)) == "0.75"
    assert decimal_string(Fraction(20)) == "20"


def test_simulate_json(capsys, validator):
    argv = ["simulate", "--problem", "none", "-k", "3", "-n", "4", "--trials", "100000", "--seed", "42", "--format", "json"]
    code, out, _ = run(argv, capsys)
    rec = json.loads(out)
    validator.validate(rec)
    assert rec["estimate"]["seed"] == 42
    assert abs(rec["estimate"]["p_hat"] - 3 / 7) <= 4 * rec["estimate"]["std_err"]
    assert rec["z_score"] <= 4
    assert run(argv, capsys)[1] == out


def test_simulate_expected_bad(capsys, validator):
    argv = ["simulate", "--problem", "expected_bad", "-k", "3", "-n", "4", "--trials", "50000", "--format", "json"]
    code, out, _ = run(argv, capsys)
    rec = json.loads(out)
    validator.validate(rec)
    assert abs(rec["estimate"]["mean"] - 3) <= 4 * rec["estimate"]["std_err"]


def test_seed_env_override():
    argv = ("simulate", "-k", "3", "-n", "3", "--trials", "1000", "--format", "json")
    a = run_process(*argv, env={"BROKENSTICK_SEED": "7"})
    b = run_process(*argv, "--seed", "7")
    assert a.returncode == 0
    assert json.loads(a.stdout)["estimate"]["seed"] == 7
    assert a.stdout == b.stdout
    bad = run_process(*argv, env={"BROKENSTICK_SEED": "seven"})
    assert bad.returncode == 2


def test_locale_independent():
    proc = run_process("exact", "-k", "3", "-n", "4", env={"LC_ALL": "de_DE.UTF-8", "LANG": "de_DE.UTF-8"})
    assert "decimal=0.428571428571429" in proc.stdout


def test_reconcile_single(capsys):
    code, out, _ = run(["reconcile", "-k", "3", "-n", "30"], capsys)
    assert code == 0 and out.startswith("all identities hold: 1 (k, n) pairs")


def test_reconcile_all(capsys):
    code, out, _ = run(["reconcile", "--all", "--n-max", "25"], capsys)
    assert code == 0 and "276 (k, n) pairs" in out


def test_reconcile_fault_injection(capsys):
    code, out, _ = run(["reconcile", "-k", "5", "-n", "8", "--inject-beta-fault", "2"], capsys)
    assert code == 1
    assert "beta forward = backward" in out and "beta_2" in out


def test_selftest_quick(capsys):
    code, out, _ = run(["selftest", "--quick"], capsys)
    assert code == 0
    assert out.count("[PASS]") == 6 and out.rstrip().endswith("PASS")

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from aerts_machines import cli


def run(argv, capsysbinary):
    code = cli.main(argv)
    out, err = capsysbinary.readouterr()
    return code, out.decode(), err.decode()


def test_bell_uniform_band_json(capsysbinary):
    code, out, _ = run(["bell", "--scenario", "uniform-band", "--trials", "0", "--format", "json"], capsysbinary)
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["s_value"] == 4.0
    assert '"s_value": 4.0' in out
    assert set(doc) >= {"command", "config", "results"}


def test_sqm_right_angle_analytic(capsysbinary):
    code, out, _ = run(["sqm", "--gamma", "1.5707963", "--trials", "0", "--format", "json"], capsysbinary)
    assert code == 0
    (row,) = json.loads(out)["results"]
    assert abs(row["p_plus_analytic"] - 0.5) < 1e-7


def test_lhv_max(capsysbinary):
    code, out, _ = run(["lhv", "--format", "json"], capsysbinary)
    doc = json.loads(out)
    assert code == 0 and doc["summary"] == {"max_s": 2.0, "strategies": 16}
    assert len(doc["results"]) == 16


def test_sqm_csv_schema(capsysbinary):
    code, out, _ = run(["sqm", "--gamma", "1.0", "--trials", "1000", "--format", "csv"], capsysbinary)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["gamma", "p_plus_analytic", "p_plus_empirical", "std_err", "trials", "seed"]
    assert len(rows) == 2
    assert rows[1][0] == "1" and rows[1][4] == "1000" and rows[1][5] == "42"
    assert abs(float(rows[1][1]) - math.cos(0.5) ** 2) < 1e-11


def test_empty_sweep_gives_header_only(capsysbinary):
    code, out, _ = run(["sqm", "--gamma", "0:1:0", "--format", "csv"], capsysbinary)
    assert code == 0
    assert out == "gamma,p_plus_analytic,p_plus_empirical,std_err,trials,seed\n"


def test_sweep_points(capsysbinary):
    code, out, _ = run(["epsilon", "--epsilon", "0.5", "--gamma", "0:3:4", "--trials", "0", "--format", "csv"], capsysbinary)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["gamma"]) for r in rows] == [0.0, 1.0, 2.0, 3.0]
    assert float(rows[0]["p_plus_analytic"]) == 1.0
    assert float(rows[3]["p_plus_analytic"]) == 0.0


def test_singlet_json_has_four_expectations(capsysbinary):
    code, out, _ = run(["bell", "--scenario", "quantum-singlet", "--trials", "20000", "--format", "json"], capsysbinary)
    doc = json.loads(out)
    assert [r["setting"] for r in doc["results"]] == ["ab", "ab'", "a'b'", "a'b"]
    for r in doc["results"]:
        assert {"analytic", "empirical", "std_err"} <= set(r)
    assert abs(doc["summary"]["s_value"] - 2 * math.sqrt(2)) < 1e-11


@pytest.mark.parametrize(
    "argv",
    [
        ["sqm", "--trials", "0", "--format", "json"],
        ["epsilon", "--epsilon", "0.3", "--trials", "0", "--format", "json"],
        ["quantum", "--trials", "0", "--format", "json"],
        ["bell", "--scenario", "fixed-break-band", "--trials", "0", "--format", "json"],
    ],
)
def test_analytic_mode_has_no_empirical_fields(argv, capsysbinary):
    code, out, _ = run(argv, capsysbinary)
    assert code == 0
    doc = json.loads(out)
    for row in doc["results"]:
        assert not {"p_plus_empirical", "empirical", "std_err"} & set(row)
    assert "s_empirical" not in doc.get("summary", {})


def test_quantum_command_matches_born(capsysbinary):
    code, out, _ = run(["quantum", "--gamma", "1.0471975511965976", "--trials", "0", "--format", "json"], capsysbinary)
    (row,) = json.loads(out)["results"]
    assert abs(row["p_plus_analytic"] - 0.75) < 1e-11


def test_json_digits(capsysbinary):
    _, out, _ = run(["bell", "--scenario", "quantum-singlet", "--trials", "0", "--format", "json"], capsysbinary)
    assert "0.707106781187" in out and "0.7071067811865" not in out


def test_table_output(capsysbinary):
    code, out, _ = run(["bell", "--scenario", "pre-broken-band", "--trials", "0"], capsysbinary)
    assert code == 0
    assert out.splitlines()[0].split() == ["setting", "analytic"]
    assert "s_value = 2" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["bell", "--scenario", "nope"],
        ["bell"],
        ["epsilon", "--epsilon", "1.5"],
        ["epsilon"],
        ["sqm", "--gamma", "a:b"],
        ["sqm", "--trials", "-1"],
        ["sqm", "--seed", "-3"],
        ["sqm", "--bogus"],
        ["teleport"],
    ],
)
def test_usage_errors_exit_2(argv, capsysbinary):
    code, out, err = run(argv, capsysbinary)
    assert code == 2
    assert out == "" and err.strip()


def test_unwritable_output_exits_1(tmp_path, capsysbinary):
    code, _, err = run(["lhv", "--out", str(tmp_path / "missing" / "x.json")], capsysbinary)
    assert code == 1 and "cannot write" in err


def test_out_file(tmp_path, capsysbinary):
    target = tmp_path / "s.json"
    code, out, _ = run(["bell", "--scenario", "uniform-band", "--trials", "0", "--format", "json", "--out", str(target)], capsysbinary)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["summary"]["s_value"] == 4.0


def test_seed_environment_variable(monkeypatch, capsysbinary):
    monkeypatch.setenv("AERTS_MACHINES_SEED", "123")
    _, out, _ = run(["sqm", "--gamma", "1", "--trials", "100", "--format", "json"], capsysbinary)
    assert json.loads(out)["config"]["seed"] == 123
    _, out, _ = run(["sqm", "--gamma", "1", "--trials", "100", "--seed", "7", "--format", "json"], capsysbinary)
    assert json.loads(out)["config"]["seed"] == 7
    monkeypatch.setenv("AERTS_MACHINES_SEED", "junk")
    code, _, _ = run(["sqm"], capsysbinary)
    assert code == 2


def test_determinism_across_workers(capsysbinary):
    argv = ["sqm", "--gamma", "0:3.14:5", "--trials", "200000", "--format", "json", "--seed", "99"]
    _, a, _ = run(argv + ["--workers", "1"], capsysbinary)
    _, b, _ = run(argv + ["--workers", "4"], capsysbinary)
    assert a == b


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "aerts_machines", "lhv", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "o_a,o_a_prime,o_b,o_b_prime,s_value"

import csv
import json

import numpy as np
import pytest

from opmod.cli import main, table_to_csv
from opmod.errors import ConfigError
from opmod.suites import SUITES, SuiteConfig, parse_config, run_suite


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def _write(path, doc):
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def test_config_requires_seed():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"suite": "schur"}')
    assert exc.value.field == "seed"


def test_config_unknown_field_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config('{\n "suite": "schur",\n "seed": 1,\n "sizes": 3\n}')
    assert exc.value.field == "sizes" and exc.value.line == 4


def test_config_json_error_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config('{\n "suite": "schur",\n "seed": 1,,\n}')
    assert exc.value.line == 3


@pytest.mark.parametrize("field,value", [("delta_grid", []), ("delta_grid", [1.0, -1.0]),
                                         ("sigma_grid", [0]), ("h_grid", "x"),
                                         ("orders", [0]), ("instances", -1), ("max_size", 0),
                                         ("functions", ["nope"]), ("seed", 1.5), ("suite", "other")])
def test_config_validation(field, value):
    doc = {"suite": "schur", "seed": 1, field: value}
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(doc))
    assert exc.value.field == field


def test_config_overrides():
    cfg = parse_config('{"suite": "schur", "seed": 1}', {"seed": 9, "out": None})
    assert cfg.seed == 9 and cfg.out is None
    assert isinstance(cfg, SuiteConfig)


def test_all_suites_accepted():
    for s in SUITES:
        assert parse_config(json.dumps({"suite": s, "seed": 0})).suite == s


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def test_empty_instance_count_trivially_passes(capsys):
    for s in SUITES:
        res = run_suite(SuiteConfig(s, 0, instances=0))
        assert res.report.passed and res.report.assertions == []


def test_run_bernstein_scalar(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {"suite": "bernstein-scalar", "seed": 3, "instances": 10})
    code, out = _run(["run", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    assert "sharpness[sigma=1,m=1]" in out.out
    with open(tmp_path / "o" / "bernstein-scalar-sharpness.csv") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        assert abs(float(r["min_ratio"]) - 1) <= 1e-9 and abs(float(r["max_ratio"]) - 1) <= 1e-9
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["schema"] == "opmod-report/1" and report["passed"] is True
    assert report["bundles"] == [str(tmp_path / "o" / "witnesses.json")]


def test_run_is_byte_deterministic(tmp_path, capsys, monkeypatch):
    cfg = _write(tmp_path / "c.json", {"suite": "schatten-ideal", "seed": 4, "instances": 5,
                                      "options": {"random_splits": 10}})
    _run(["run", "--config", cfg, "--out", str(tmp_path / "a")], capsys)
    monkeypatch.setenv("OPMOD_THREADS", "3")
    _run(["run", "--config", cfg, "--out", str(tmp_path / "b")], capsys)
    a = (tmp_path / "a" / "schatten-ideal-splits.csv").read_bytes()
    b = (tmp_path / "b" / "schatten-ideal-splits.csv").read_bytes()
    assert a == b and b"\r\n" not in a


def test_run_moduli_gap_csv(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {"suite": "moduli-gap", "seed": 0, "instances": 6,
                                      "sigma_grid": [1.0], "delta_grid": [0.5, 2.0],
                                      "options": {"N": 2048}})
    code, out = _run(["run", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    assert code == 0, out.out
    with open(tmp_path / "o" / "moduli-gap-gap.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["delta", "omega_lower_pair", "omega_upper_pair", "flat_lower", "flat_exact"]
    row2 = [r for r in rows if float(r["delta"]) == 2.0][0]
    assert float(row2["flat_exact"]) == 2.0
    # replay the gap witnesses
    code, out = _run(["replay", str(tmp_path / "o" / "witnesses.json")], capsys)
    assert code == 0, out.out


def test_run_flags_without_config(tmp_path, capsys):
    code, out = _run(["run", "--suite", "lipschitz-failure", "--seed", "0", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "lipschitz-failure-geometric.csv").exists()


def test_run_usage_errors(tmp_path, capsys):
    code, out = _run(["run", "--suite", "schur"], capsys)
    assert code == 2 and "seed" in out.err
    bad = tmp_path / "bad.json"
    bad.write_text('{"suite": "schur",\n"seed": 1,\n"bogus": 2}')
    code, out = _run(["run", "--config", str(bad)], capsys)
    assert code == 2 and "bogus" in out.err and "line 3" in out.err
    code, out = _run(["run", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    with pytest.raises(SystemExit):
        main(["run", "--suite", "nope"])


def test_csv_formatting():
    text = table_to_csv(("a", "b"), [(0.1, 1), (np.float64(1 / 3), True)])
    assert text == "a,b\n0.10000000000000001,1\n0.33333333333333331,true\n"


def test_configured_functions_replace_random_ones(tmp_path, capsys):
    cfg = SuiteConfig("bernstein-operator", 1, instances=6, functions=("exp_i:2.0", "expsum:1.5:1:0.5:0"))
    res = run_suite(cfg)
    assert res.report.passed
    # exp(2it) on a 1x1 pair attains the bound, so the worst ratio is at most 1
    assert res.report.worst_ratios["operator_pair"] <= 1 + 1e-9
    res = run_suite(SuiteConfig("bernstein-unitary", 1, instances=4, functions=("trig:2:0,1,3,1,0",)))
    assert res.report.passed
    res = run_suite(SuiteConfig("bernstein-scalar", 1, instances=4, functions=("exp_i:3",)))
    assert res.report.worst_ratios["scalar_random"] == pytest.approx(1.0, abs=1e-9)


def test_configured_functions_of_wrong_kind(tmp_path, capsys):
    with pytest.raises(ConfigError) as exc:
        run_suite(SuiteConfig("bernstein-unitary", 1, instances=2, functions=("exp_i:1",)))
    assert exc.value.field == "functions"
    cfg = _write(tmp_path / "c.json", {"suite": "bernstein-operator", "seed": 1, "functions": ["abs"]})
    code, out = _run(["run", "--config", cfg], capsys)
    assert code == 2 and "functions" in out.err

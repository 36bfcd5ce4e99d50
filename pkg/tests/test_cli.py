import json
import subprocess
import sys

import pytest

from graphnls.cli import main

CONFIG = """
edge minus v0 open inf
edge plus v0 open inf
vertex v0 delta alpha=1
problem p=4
"""


def run_cli(args):
    return main(list(args))


def test_thresholds_table(tmp_path, capsys):
    assert run_cli(["thresholds", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "omega_star_delta_prime = 8" in out
    assert "mu_star_doubly_critical = 1.48449215942" in out
    assert "critical_mass_q4 = 2" in out
    csv = (tmp_path / "thresholds.csv").read_text()
    assert csv.splitlines()[0] == "name,value"
    assert (tmp_path / "manifest.json").exists()


def test_thresholds_deterministic(tmp_path):
    run_cli(["thresholds", "--out", str(tmp_path / "a")])
    run_cli(["thresholds", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "thresholds.csv").read_bytes() == \
        (tmp_path / "b" / "thresholds.csv").read_bytes()


def test_solve_with_config_file(tmp_path):
    cfg = tmp_path / "delta.cfg"
    cfg.write_text(CONFIG)
    out = tmp_path / "run"
    code = run_cli(["solve", "--config", str(cfg), "--omega", "1",
                    "--h", "0.02", "--out", str(out)])
    assert code == 0
    report = (out / "report.txt").read_text()
    assert "status = converged" in report
    assert (out / "profile.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "solve"
    assert manifest["omega"] == 1.0


def test_solve_missing_config_exits_2_without_output(tmp_path, capsys):
    out = tmp_path / "never"
    code = run_cli(["solve", "--config", str(tmp_path / "absent.cfg"),
                    "--mass", "1", "--out", str(out)])
    assert code == 2
    assert not out.exists()
    assert "error:" in capsys.readouterr().err


def test_solve_below_threshold_exits_1(tmp_path, capsys):
    cfg = tmp_path / "delta.cfg"
    cfg.write_text(CONFIG)
    code = run_cli(["solve", "--config", str(cfg), "--omega", "0.2",
                    "--out", str(tmp_path / "o")])
    assert code == 1
    assert "no stationary state expected" in capsys.readouterr().err


def test_solve_unbounded_exit_code(tmp_path):
    cfg = tmp_path / "p6.cfg"
    cfg.write_text("edge m v0 open inf\nedge p v0 open inf\nproblem p=6\n")
    code = run_cli(["solve", "--config", str(cfg), "--mass", "3.1",
                    "--h", "0.05", "--out", str(tmp_path / "o")])
    assert code == 3
    report = (tmp_path / "o" / "report.txt").read_text()
    assert "status = unbounded-suspected" in report


def test_scan_rows_and_determinism(tmp_path):
    for sub in ("a", "b"):
        code = run_cli(["scan", "--preset", "delta-prime-line",
                        "--grid", "7:9:3", "--h", "0.05",
                        "--out", str(tmp_path / sub)])
        assert code == 0
    a = (tmp_path / "a" / "scan.csv").read_bytes()
    assert a == (tmp_path / "b" / "scan.csv").read_bytes()
    lines = a.decode().splitlines()
    assert lines[0] == "param,x,value,mass,omega,residual,asymmetry,branch,converged,status"
    assert len(lines) == 4
    # asymmetry appears only above the symmetry-breaking frequency
    assert lines[1].split(",")[6] == "0"
    assert float(lines[3].split(",")[6]) > 0.1


def test_scan_failed_points_keep_status_not_numbers(tmp_path):
    # frequencies below the threshold cannot be fabricated into rows
    code = run_cli(["scan", "--preset", "delta-line-attractive",
                    "--grid", "0.1:1:2", "--h", "0.05",
                    "--out", str(tmp_path / "s")])
    assert code == 0
    lines = (tmp_path / "s" / "scan.csv").read_text().splitlines()
    bad = lines[1].split(",")
    assert bad[2] == "" and bad[3] == ""
    assert "error" in bad[-1]
    good = lines[2].split(",")
    assert good[-1] == "converged"


def test_stability_cli(tmp_path, capsys):
    code = run_cli(["stability", "--preset", "delta-line-attractive",
                    "--grid", "0.5:3:9", "--out", str(tmp_path / "st")])
    assert code == 0
    lines = (tmp_path / "st" / "curve.csv").read_text().splitlines()
    assert lines[0] == "omega,d,mass,d2,verdict"
    assert len(lines) == 10
    assert "stable" in lines[2]
    summary = (tmp_path / "st" / "summary.txt").read_text()
    assert "GSS-surrogate" in summary


def test_bracket_cli_constant_predicate(tmp_path):
    # balanced powers: the existence predicate does not flip with mass
    code = run_cli(["bracket", "--preset", "star3-nld-balanced",
                    "--grid", "0.8:2:1", "--h", "0.05", "--max-iter", "1500",
                    "--out", str(tmp_path / "br")])
    assert code == 0
    text = (tmp_path / "br" / "bracket.txt").read_text()
    assert "orientation = constant" in text
    assert "no threshold in range" in text


def test_list_presets(capsys):
    assert run_cli(["--list-presets"]) == 0
    out = capsys.readouterr().out
    for name in ("kirchhoff-line", "delta-prime-line", "line-doubly-critical"):
        assert name in out


def test_usage_error_without_subcommand(capsys):
    assert run_cli([]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "graphnls", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "graphnls" in proc.stdout

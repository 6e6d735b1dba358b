import math

import pytest

from qedtangle.cli import main
from qedtangle.scan import parse_csv


def test_scan_writes_csv(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    rc = main(["scan", "--process", "moller", "--p-min", "0.5", "--p-max", "1.5",
               "--p-steps", "3", "--theta-steps", "4", "--out", str(out)])
    assert rc == 0
    rows = parse_csv(out)
    assert len(rows) == 12
    assert "wrote 12 rows" in capsys.readouterr().out


def test_scan_with_config_file_and_override(tmp_path):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("process = compton\ninitial = ll\n"
                   "p_min = 0.5\np_max = 2.0\np_steps = 2\n"
                   "theta_steps = 3\n# comment line\nout = ignored.csv\n")
    out = tmp_path / "real.csv"
    rc = main(["scan", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    rows = parse_csv(out)
    assert len(rows) == 6
    assert rows[0].process == "compton"
    assert rows[0].initial == "pure(LL)"


def test_invalid_process_exit_code():
    assert main(["scan", "--process", "pingpong", "--out", "x.csv"]) == 2


def test_missing_out_exit_code():
    assert main(["scan", "--process", "moller"]) == 2


def test_unwritable_output_exit_code(tmp_path):
    rc = main(["scan", "--process", "moller", "--p-steps", "2",
               "--theta-steps", "2", "--out", str(tmp_path / "no" / "dir" / "x.csv")])
    assert rc == 4


def test_threshold_command(capsys):
    rc = main(["threshold", "--process", "moller", "--theta", str(math.pi / 2),
               "--p-bracket", "0.5,2.0"])
    assert rc == 0
    value = float(capsys.readouterr().out.strip())
    assert value == pytest.approx(1.0517, abs=2e-3)


def test_threshold_bad_bracket_exit_code(capsys):
    rc = main(["threshold", "--process", "moller", "--theta", str(math.pi / 2),
               "--p-bracket", "2.0,3.0"])
    assert rc == 2


def test_missing_process_exit_code():
    assert main(["threshold", "--theta", "1.0", "--p-bracket", "0.5,2.0"]) == 2
    assert main(["threshold", "--process", "moller", "--theta", "1.0",
                 "--p-bracket", "oops"]) == 2
    assert main(["point", "--p", "1.0", "--theta", "1.0"]) == 2


def test_point_command(capsys):
    rc = main(["point", "--process", "electron-muon", "--p", "7.348", "--theta",
               str(math.pi), "--initial", "unpolarized"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "negativity" in text and "closest Bell" in text


def test_point_below_threshold_exit_code():
    assert main(["point", "--process", "muon-pair", "--p", "50.0",
                 "--theta", "1.0"]) == 2


def test_xsec_command(capsys):
    rc = main(["xsec", "--process", "compton", "--p", "1.3", "--theta", "2.0"])
    assert rc == 0
    assert "relative difference" in capsys.readouterr().out


def test_audit_command(capsys):
    rc = main(["audit", "--samples", "3", "--seed", "11"])
    out = capsys.readouterr().out
    assert rc == 0, out
    assert "ALL PASS" in out


def test_scan_log_grid_flag(tmp_path):
    out = tmp_path / "log.csv"
    rc = main(["scan", "--process", "compton", "--p-min", "0.1", "--p-max", "10",
               "--p-steps", "3", "--p-log", "--theta-steps", "2", "--out", str(out)])
    assert rc == 0
    ps = sorted({r.p for r in parse_csv(out)})
    assert ps[1] == pytest.approx(1.0)      # geometric midpoint of 0.1 and 10


def test_plot_script_flag(tmp_path):
    out = tmp_path / "rows.csv"
    gp = tmp_path / "rows.gp"
    rc = main(["scan", "--process", "bhabha", "--p-min", "0.3", "--p-max", "0.4",
               "--p-steps", "2", "--theta-steps", "2", "--out", str(out),
               "--plot-script", str(gp)])
    assert rc == 0
    assert gp.exists() and str(out) in gp.read_text()

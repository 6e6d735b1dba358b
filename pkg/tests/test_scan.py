import math

import numpy as np
import pytest

from qedtangle.constants import DEFAULT
from qedtangle.errors import InvalidConfigError
from qedtangle.kinematics import ProcessKind
from qedtangle.scan import (CSV_HEADER, ScanConfig, ScanRow, emit_csv,
                            emit_plot_script, find_threshold, parse_csv,
                            parse_initial, run_scan, symmetry_audit)


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        ScanConfig(process=ProcessKind.MOLLER, p_min=-1.0).validate()
    with pytest.raises(InvalidConfigError):
        ScanConfig(process=ProcessKind.MOLLER, p_min=2.0, p_max=1.0).validate()
    with pytest.raises(InvalidConfigError):
        ScanConfig(process=ProcessKind.MOLLER, p_steps=0).validate()
    with pytest.raises(InvalidConfigError):
        ScanConfig(process=ProcessKind.MOLLER, jobs=0).validate()
    with pytest.raises(InvalidConfigError):
        ScanConfig(process=ProcessKind.MOLLER, tol=0.0).validate()


def test_parse_initial():
    assert parse_initial("unpolarized").description == "unpolarized"
    assert parse_initial("lr").description == "pure(LR)"
    assert parse_initial("werner").description == "werner"
    assert parse_initial("diag:0.5,0.5,0,0").description.startswith("diag:")
    with pytest.raises(InvalidConfigError):
        parse_initial("sideways")
    with pytest.raises(InvalidConfigError):
        parse_initial("diag:1,2")


def test_single_point_grid():
    cfg = ScanConfig(process=ProcessKind.BHABHA, p_min=0.32, p_max=0.32,
                     p_steps=1, theta_min=math.pi, theta_max=math.pi, theta_steps=1)
    rows = run_scan(cfg)
    assert len(rows) == 1
    assert rows[0].status == "ok"
    assert rows[0].p == pytest.approx(0.32)


def test_theta_major_ordering():
    cfg = ScanConfig(process=ProcessKind.MUON_PAIR, p_min=150.0, p_max=200.0,
                     p_steps=2, theta_steps=2)
    rows = run_scan(cfg)
    assert len(rows) == 4
    # theta is the slow index: (t0,p0), (t0,p1), (t1,p0), (t1,p1)
    assert rows[0].theta == rows[1].theta
    assert rows[2].theta == rows[3].theta
    assert rows[0].theta < rows[2].theta
    assert rows[0].p < rows[1].p


def test_cell_centered_theta_grid():
    cfg = ScanConfig(process=ProcessKind.COMPTON, p_min=1.0, p_max=1.0,
                     p_steps=1, theta_steps=4)
    rows = run_scan(cfg)
    thetas = [r.theta for r in rows]
    assert thetas == pytest.approx([math.pi / 4, 3 * math.pi / 4,
                                    5 * math.pi / 4, 7 * math.pi / 4])


def test_pole_nudging():
    # an odd cell count puts a grid center exactly on the backward pole ray
    cfg = ScanConfig(process=ProcessKind.MOLLER, p_min=1.0, p_max=1.0,
                     p_steps=1, theta_steps=3)
    rows = run_scan(cfg)
    assert all(r.status == "ok" for r in rows)
    step = 2 * math.pi / 3
    assert rows[1].theta == pytest.approx(math.pi + 0.5 * step)


def test_exact_pole_is_divergent():
    cfg = ScanConfig(process=ProcessKind.MOLLER, p_min=1.0, p_max=1.0, p_steps=1,
                     theta_min=0.0, theta_max=0.0, theta_steps=1)
    rows = run_scan(cfg)
    assert rows[0].status == "divergent"
    assert rows[0].negativity is None


def test_below_threshold_rows():
    thr = math.sqrt(DEFAULT.m_mu ** 2 - DEFAULT.m_e ** 2)
    cfg = ScanConfig(process=ProcessKind.MUON_PAIR, p_min=0.5 * thr,
                     p_max=2.0 * thr, p_steps=4, theta_steps=2)
    rows = run_scan(cfg)
    statuses = {round(r.p, 3): r.status for r in rows}
    assert any(s == "below-threshold" for s in statuses.values())
    assert any(s == "ok" for s in statuses.values())
    for r in rows:
        if r.status == "below-threshold":
            assert r.p < thr and r.min_pt_eig is None


def test_csv_round_trip(tmp_path):
    cfg = ScanConfig(process=ProcessKind.ANNIHILATION, p_min=0.3, p_max=1.2,
                     p_steps=3, theta_steps=4, initial="werner")
    rows = run_scan(cfg)
    path = tmp_path / "scan.csv"
    emit_csv(rows, path)
    content = path.read_text()
    assert content.splitlines()[0] == CSV_HEADER
    back = parse_csv(path)
    assert len(back) == len(rows)
    for a, b in zip(rows, back):
        assert a.process == b.process and a.initial == b.initial
        assert a.p == b.p and a.theta == b.theta      # full precision round trip
        assert a.min_pt_eig == b.min_pt_eig
        assert a.entangled == b.entangled and a.status == b.status


def test_log_spaced_p_grid():
    cfg = ScanConfig(process=ProcessKind.COMPTON, p_min=0.01, p_max=100.0,
                     p_steps=5, p_log=True, theta_steps=1,
                     theta_min=1.0, theta_max=1.0)
    rows = run_scan(cfg)
    ps = [r.p for r in rows]
    assert ps[0] == pytest.approx(0.01) and ps[-1] == pytest.approx(100.0)
    ratios = [ps[i + 1] / ps[i] for i in range(4)]
    assert all(r == pytest.approx(ratios[0], rel=1e-12) for r in ratios)


def test_csv_round_trip_with_status_rows(tmp_path):
    # grid straddling the production threshold mixes ok and status-only rows
    thr = math.sqrt(DEFAULT.m_mu ** 2 - DEFAULT.m_e ** 2)
    cfg = ScanConfig(process=ProcessKind.MUON_PAIR, p_min=0.5 * thr,
                     p_max=1.5 * thr, p_steps=3, theta_steps=2)
    rows = run_scan(cfg)
    path = tmp_path / "mixed.csv"
    emit_csv(rows, path)
    back = parse_csv(path)
    assert [r.status for r in back] == [r.status for r in rows]
    for a, b in zip(rows, back):
        assert (a.min_pt_eig is None) == (b.min_pt_eig is None)
        assert a.negativity == b.negativity


def test_custom_tolerance_changes_flags():
    # a huge PPT tolerance declares everything separable
    cfg = ScanConfig(process=ProcessKind.MOLLER, p_min=0.2, p_max=0.6,
                     p_steps=2, theta_min=math.pi / 2, theta_max=math.pi / 2,
                     theta_steps=1, tol=1.0)
    rows = run_scan(cfg)
    assert all(not r.entangled for r in rows if r.status == "ok")
    cfg = ScanConfig(process=ProcessKind.MOLLER, p_min=0.2, p_max=0.6,
                     p_steps=2, theta_min=math.pi / 2, theta_max=math.pi / 2,
                     theta_steps=1)
    rows = run_scan(cfg)
    assert any(r.entangled for r in rows if r.status == "ok")


def test_csv_header_only_for_empty(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == CSV_HEADER + "\n"
    assert parse_csv(path) == []


def test_scan_determinism_and_jobs(tmp_path):
    base = dict(process=ProcessKind.COMPTON, p_min=0.1, p_max=20.0, p_steps=7,
                theta_steps=9, initial="ll")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_scan(ScanConfig(**base)), a)
    emit_csv(run_scan(ScanConfig(**base)), b)
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    emit_csv(run_scan(ScanConfig(**base, jobs=3)), c)
    assert a.read_bytes() == c.read_bytes()


def test_plot_script_references_csv(tmp_path):
    cfg = ScanConfig(process=ProcessKind.MOLLER, p_min=0.5, p_max=1.5,
                     p_steps=2, theta_steps=2)
    rows = run_scan(cfg)
    csv_path = tmp_path / "rows.csv"
    gp_path = tmp_path / "rows.gp"
    emit_csv(rows, csv_path)
    emit_plot_script(rows, gp_path, csv_path)
    script = gp_path.read_text()
    assert str(csv_path) in script
    assert "plot" in script


def test_symmetry_audit_clean_and_violated():
    cfg = ScanConfig(process=ProcessKind.MOLLER, p_min=0.4, p_max=2.0,
                     p_steps=4, theta_steps=8)
    rows = run_scan(cfg)
    assert symmetry_audit(rows, ProcessKind.MOLLER) == []
    # corrupt one row: the audit must flag the broken pair
    bad = list(rows)
    r = bad[3]
    bad[3] = ScanRow(r.process, r.initial, r.p, r.theta, r.min_pt_eig,
                     (r.negativity or 0.0) + 1e-3, r.log_negativity,
                     r.entropy, r.entangled, r.switching, r.status)
    assert symmetry_audit(bad, ProcessKind.MOLLER)


def test_bhabha_audit_uses_reflection():
    cfg = ScanConfig(process=ProcessKind.BHABHA, p_min=0.4, p_max=1.0,
                     p_steps=3, theta_steps=8)
    rows = run_scan(cfg)
    assert symmetry_audit(rows, ProcessKind.BHABHA) == []


def test_find_threshold_moller():
    want = math.sqrt(math.sqrt(5.0) + 2.0) * DEFAULT.m_e
    got = find_threshold(ProcessKind.MOLLER, "unpolarized", math.pi / 2, (0.5, 2.0))
    assert got == pytest.approx(want, rel=1e-5)


def test_find_threshold_requires_sign_change():
    with pytest.raises(InvalidConfigError):
        find_threshold(ProcessKind.MOLLER, "unpolarized", math.pi / 2, (2.0, 3.0))


def test_find_threshold_electron_muon():
    want = math.sqrt(DEFAULT.m_e * DEFAULT.m_mu) / 2.0
    got = find_threshold(ProcessKind.ELECTRON_MUON, "unpolarized", math.pi, (1.0, 10.0))
    assert got == pytest.approx(want, rel=5e-3)

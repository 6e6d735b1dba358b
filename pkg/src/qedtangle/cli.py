"""Command-line front end.

Subcommands:
  scan       sweep a (p, theta) grid, write CSV (and optionally a gnuplot script)
  threshold  bisect the entanglement boundary in p at fixed theta
  point      full entanglement report for one kinematic point
  xsec       differential cross-section validation against the closed forms
  audit      oracle / Ward-identity / symmetry / measure-sanity suite

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .amplitudes import amplitude
from .constants import DEFAULT
from .entanglement import analyze, measures_batch
from .errors import (EigenSolverError, InvalidConfigError, InvalidKinematicsError,
                     QedTangleError)
from .kinematics import ProcessKind, build_kinematics, mandelstam_batch
from .qstate import evolve
from .scan import (ScanConfig, cross_section_check, emit_csv, emit_plot_script,
                   find_threshold, parse_initial, parse_process, run_scan)
from .xsection import dsigma_domega_oracle, msq_summed

log = logging.getLogger(__name__)


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return values


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _build_scan_config(args) -> ScanConfig:
    file_vals = _read_config_file(args.config) if args.config else {}

    def pick(name, flag_value, cast):
        if flag_value is not None:
            return flag_value
        if name in file_vals:
            raw = file_vals[name]
            if cast is bool:
                if raw.lower() not in _BOOL:
                    raise InvalidConfigError(f"bad boolean for {name}: {raw!r}")
                return _BOOL[raw.lower()]
            return cast(raw)
        return None

    process = pick("process", args.process, str)
    if process is None:
        raise InvalidConfigError("--process is required (flag or config file)")
    kwargs = dict(process=parse_process(process))
    for name, flag, cast, default in [
            ("initial", args.initial, str, "unpolarized"),
            ("p_min", args.p_min, float, 0.01),
            ("p_max", args.p_max, float, 3.0),
            ("p_steps", args.p_steps, int, 100),
            ("p_log", args.p_log or None, bool, False),
            ("theta_min", args.theta_min, float, 0.0),
            ("theta_max", args.theta_max, float, 2.0 * math.pi),
            ("theta_steps", args.theta_steps, int, 100),
            ("tol", args.tol, float, 1e-10),
            ("out", args.out, str, None),
            ("jobs", args.jobs, int, 1)]:
        value = pick(name, flag, cast)
        kwargs[name] = default if value is None else value
    try:
        return ScanConfig(**kwargs).validate()
    except (TypeError, ValueError) as exc:
        raise InvalidConfigError(str(exc)) from exc


def _cmd_scan(args) -> int:
    cfg = _build_scan_config(args)
    if cfg.out is None:
        raise InvalidConfigError("scan requires --out (or 'out' in the config file)")
    rows = run_scan(cfg)
    emit_csv(rows, cfg.out)
    print(f"wrote {len(rows)} rows to {cfg.out}")
    if args.plot_script:
        emit_plot_script(rows, args.plot_script, cfg.out)
        print(f"wrote plot script to {args.plot_script}")
    return 0


def _require_process(args) -> ProcessKind:
    if not args.process:
        raise InvalidConfigError("--process is required")
    return parse_process(args.process)


def _cmd_threshold(args) -> int:
    process = _require_process(args)
    try:
        lo, hi = (float(x) for x in args.p_bracket.split(","))
    except ValueError as exc:
        raise InvalidConfigError(f"--p-bracket expects 'lo,hi', got {args.p_bracket!r}") from exc
    p_star = find_threshold(process, args.initial or "unpolarized",
                            args.theta, (lo, hi), tol=args.tol or 1e-10)
    print(f"{p_star:.9g}")
    return 0


def _cmd_point(args) -> int:
    process = _require_process(args)
    kin = build_kinematics(process, args.p, args.theta)
    amp = amplitude(kin)
    state = evolve(amp, parse_initial(args.initial or "unpolarized"))
    report = analyze(state, tol=args.tol or 1e-10)
    print(f"process          : {process.value}")
    print(f"p, theta         : {kin.p:.9g} MeV, {kin.theta:.9g} rad")
    print(f"s, t, u          : {kin.s:.9g}, {kin.t:.9g}, {kin.u:.9g} MeV^2")
    print("density matrix (re | im):")
    for row in state.entries:
        re = " ".join(f"{x.real:+.6f}" for x in row)
        im = " ".join(f"{x.imag:+.6f}" for x in row)
        print(f"  {re}   |   {im}")
    print(f"PT eigenvalues   : {', '.join(f'{x:.6e}' for x in report.pt_eigenvalues)}")
    print(f"negativity       : {report.negativity:.9g}")
    print(f"log-negativity   : {report.log_negativity:.9g}")
    print(f"entropy          : {report.entropy:.9g}")
    print(f"purity           : {report.purity:.9g}")
    print(f"entangled        : {report.entangled}")
    print(f"switching        : {report.switching_potential}")
    label, fid = report.closest_bell
    print(f"closest Bell     : {label} (fidelity {fid:.6f})")
    label, fid = report.closest_bell_phase_opt
    print(f"  up to phases   : {label} (fidelity {fid:.6f})")
    return 0


def _cmd_xsec(args) -> int:
    process = _require_process(args)
    kin = build_kinematics(process, args.p, args.theta)
    got = cross_section_check(process, kin)
    want = dsigma_domega_oracle(kin)
    rel = abs(got - want) / abs(want) if want else float("inf")
    print(f"dsigma/dOmega (helicity matrix) : {got:.12e} MeV^-2")
    print(f"dsigma/dOmega (closed form)     : {want:.12e} MeV^-2")
    print(f"relative difference             : {rel:.3e}")
    return 0 if rel < 1e-8 else 3


def _cmd_audit(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0

    def report(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1

    # 1. spin-summed |M|^2 vs closed forms
    for process in ProcessKind:
        worst = 0.0
        for _ in range(args.samples):
            p = float(rng.uniform(110.0, 5000.0)) if process is ProcessKind.MUON_PAIR \
                else float(rng.uniform(0.05, 50.0))
            theta = float(rng.uniform(0.1, math.pi - 0.1))
            kin = build_kinematics(process, p, theta)
            amp = amplitude(kin)
            want = msq_summed(process, kin.s, kin.t, kin.u, kin.constants)
            worst = max(worst, abs(amp.spin_summed_msq() - want) / abs(want))
        report(f"oracle {process.value}", worst < 1e-8, f"worst rel err {worst:.2e}")

    # 2. Ward identities (replace a polarization vector by its momentum)
    from .amplitudes import annihilation_batch, compton_batch
    p = np.array([rng.uniform(0.5, 5.0)])
    th = np.array([rng.uniform(0.2, math.pi - 0.2)])
    s, t, u, e1, e2, e3, e4, q = mandelstam_batch(ProcessKind.ANNIHILATION, p, th)
    kvec = np.stack([e3, q * np.sin(th), np.zeros(1), q * np.cos(th)], axis=-1).astype(complex)
    scale = np.max(np.abs(annihilation_batch(p, th)[0]))
    ward = np.max(np.abs(annihilation_batch(p, th, DEFAULT,
                                            eps1_vectors={h: kvec for h in "LR"})[0]))
    report("Ward annihilation", ward / scale < 1e-10, f"residual {ward / scale:.2e}")
    s, t, u, e1, e2, e3, e4, q = mandelstam_batch(ProcessKind.COMPTON, p, th)
    kvec = np.stack([e4, -q * np.sin(th), np.zeros(1), -q * np.cos(th)], axis=-1).astype(complex)
    scale = np.max(np.abs(compton_batch(p, th)[0]))
    ward = np.max(np.abs(compton_batch(p, th, DEFAULT,
                                       eps_out_vectors={h: kvec for h in "LR"})[0]))
    report("Ward compton", ward / scale < 1e-10, f"residual {ward / scale:.2e}")

    # 3. symmetry spot checks on small grids
    from .scan import symmetry_audit
    for process in (ProcessKind.MOLLER, ProcessKind.MUON_PAIR,
                    ProcessKind.ANNIHILATION, ProcessKind.BHABHA):
        muonic = process is ProcessKind.MUON_PAIR
        cfg = ScanConfig(process=process,
                         p_min=120.0 if muonic else 0.4,
                         p_max=500.0 if muonic else 2.0,
                         p_steps=6, theta_steps=16)
        warnings = symmetry_audit(run_scan(cfg), process)
        report(f"symmetry {process.value}", not warnings,
               warnings[0] if warnings else "all pairs consistent")

    # 4. measure sanity on random density matrices
    n = max(200, args.samples * 40)
    g = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    rho = g @ g.conj().transpose(0, 2, 1)
    rho /= np.einsum('naa->n', rho).real[:, None, None]
    res = measures_batch(rho)
    from .entanglement import partial_transpose_batch
    from .linalg import hermitian_eigenvalues_batch
    eigs = hermitian_eigenvalues_batch(partial_transpose_batch(rho))
    at_most_one = int(np.max(np.sum(eigs < -1e-10, axis=1)))
    ent_ok = bool(np.all(res["entropy"] > -1e-12)
                  and np.all(res["entropy"] < math.log(4.0) + 1e-9))
    en_ok = bool(np.allclose(res["log_negativity"],
                             np.log2(2 * res["negativity"] + 1), atol=1e-12))
    report("measure sanity", at_most_one <= 1 and ent_ok and en_ok,
           f"{n} random states, max negative PT count {at_most_one}")

    print(f"{'ALL PASS' if failures == 0 else f'{failures} FAILURE(S)'}")
    return 0 if failures == 0 else 3


def _add_common(sp) -> None:
    sp.add_argument("--process", help="moller|muon-pair|annihilation|bhabha|"
                                      "electron-muon|compton")
    sp.add_argument("--initial", help="unpolarized|ll|lr|rl|rr|werner|diag:w1,w2,w3,w4")
    sp.add_argument("--tol", type=float, help="PPT tolerance (default 1e-10)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qedtangle",
        description="Helicity entanglement of tree-level QED 2->2 scattering")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scan", help="sweep a (p, theta) grid and write CSV")
    _add_common(sp)
    sp.add_argument("--p-min", dest="p_min", type=float)
    sp.add_argument("--p-max", dest="p_max", type=float)
    sp.add_argument("--p-steps", dest="p_steps", type=int)
    sp.add_argument("--p-log", dest="p_log", action="store_true", default=False)
    sp.add_argument("--theta-min", dest="theta_min", type=float)
    sp.add_argument("--theta-max", dest="theta_max", type=float)
    sp.add_argument("--theta-steps", dest="theta_steps", type=int)
    sp.add_argument("--out", help="output CSV path")
    sp.add_argument("--jobs", type=int, help="parallel evaluation chunks")
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--plot-script", dest="plot_script", help="write gnuplot commands here")
    sp.set_defaults(func=_cmd_scan)

    sp = sub.add_parser("threshold", help="bisect the entanglement boundary in p")
    _add_common(sp)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--p-bracket", dest="p_bracket", required=True,
                    help="lo,hi bracket in MeV")
    sp.set_defaults(func=_cmd_threshold)

    sp = sub.add_parser("point", help="full report at one kinematic point")
    _add_common(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.set_defaults(func=_cmd_point)

    sp = sub.add_parser("xsec", help="cross-section check at one point")
    _add_common(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.set_defaults(func=_cmd_xsec)

    sp = sub.add_parser("audit", help="oracle / symmetry / sanity suite")
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--seed", type=int, default=2024)
    sp.set_defaults(func=_cmd_audit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except EigenSolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (InvalidConfigError, InvalidKinematicsError, QedTangleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

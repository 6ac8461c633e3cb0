"""``entangler`` command-line tool.

``entangler <subcommand> [--config PATH] [--out DIR]``

Subcommands write CSV files into ``--out`` (default: the config's
``run.output_path``):

=============  ==========================================================
couplings      couplings.csv, regime report on stdout
evolve         evolution.csv: subspace amplitudes and no-decay probability
fig2           fig2.csv: entanglement of the evolving state
fig3           fig3.csv: Bell success curves for every gamma in gamma_list
protocol       protocol.csv, human-readable report on stdout
sweep          sweep.csv (success peaks over gamma_list) plus every
               product named in ``run.emit``
=============  ==========================================================

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__, dynamics, entanglement, protocol
from .config import load_config
from .errors import ConfigError, NumericalError
from .model import derive_couplings, fiber_loss_ratio, validate_regime

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.12g}"


def write_csv(path: Path, cfg, header, rows, footer=()):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# entangler {__version__} config_sha256={cfg.digest()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
        for line in footer:
            fh.write(f"# {line}\n")
    return path


def tau_grid(cfg):
    return np.linspace(0.0, cfg.tau_max, cfg.tau_points)


def rate_label(g):
    return f"{g:g}"


def cmd_couplings(cfg, out: Path, stream):
    p = cfg.physical_params()
    c = derive_couplings(p)
    report = validate_regime(p, c, cfg.thresholds)
    rows = [("chi", c.chi), ("M_re", c.m.real), ("M_im", c.m.imag),
            ("W3_re", c.w_cubed.real), ("W3_im", c.w_cubed.imag)]
    for i, a in enumerate(c.alpha, 1):
        rows += [(f"alpha{i}_re", a.real), (f"alpha{i}_im", a.imag)]
    rows += [("J12", c.j[0]), ("J23", c.j[1]), ("J31", c.j[2]), ("symmetric", c.symmetric),
             ("Gamma", p.gamma_laser)]
    if p.nu > 0:
        rows.append(("fiber_loss_ratio", fiber_loss_ratio(p)))
    rows += [("Delta_over_g", report.delta_over_g), ("kappa_over_g", report.kappa_over_g),
             ("detuning_mismatch", report.detuning_mismatch),
             ("Gamma_over_min_J", report.gamma_over_min_j), ("regime_ok", report.ok)]
    for key, val in rows:
        print(f"{key:>18} = {fmt(val)}", file=stream)
    for w in report.warnings():
        print(f"WARN {w}", file=stream)
    write_csv(out / "couplings.csv", cfg, ["quantity", "value"], rows)


def cmd_evolve(cfg, out: Path, stream):
    tau = tau_grid(cfg)
    c = dynamics.evolve_dissipative(np.eye(6)[0], tau, cfg.gamma_spont)
    header = ["tau_over_pi"]
    for i in range(1, 7):
        header += [f"re_c{i}", f"im_c{i}"]
    header.append("p_no_decay")
    norm2 = np.sum(np.abs(c) ** 2, axis=-1)
    rows = []
    for k, t in enumerate(tau):
        row = [t / math.pi]
        for i in range(6):
            row += [c[k, i].real, c[k, i].imag]
        row.append(norm2[k])
        rows.append(row)
    write_csv(out / "evolution.csv", cfg, header, rows)
    print(f"wrote {out / 'evolution.csv'} ({len(rows)} rows)", file=stream)


def cmd_entanglement(cfg, out: Path, stream):
    tau = tau_grid(cfg)
    arrs = entanglement.entanglement_arrays(
        entanglement.evolved_states(tau, cfg.gamma_spont))
    keys = ["C12", "C13", "C23", "tangle_1_rest", "tangle_2_rest", "tangle_3_rest",
            "C123_focus1", "C123_focus2", "C123_focus3"]
    rows = [[t / math.pi] + [arrs[k][i] for k in keys] for i, t in enumerate(tau)]
    write_csv(out / "entanglement.csv", cfg, ["tau_over_pi"] + keys, rows)
    print(f"wrote {out / 'entanglement.csv'}", file=stream)


def cmd_fig2(cfg, out: Path, stream):
    tau = tau_grid(cfg)
    arrs = entanglement.entanglement_arrays(entanglement.evolved_states(tau, 0.0))
    rows = [(t / math.pi, arrs["C123_focus1"][i], arrs["tangle_2_rest"][i],
             arrs["C12"][i], arrs["C23"][i]) for i, t in enumerate(tau)]
    write_csv(out / "fig2.csv", cfg, ["tau_over_pi", "C123", "tangle_2_rest", "C12", "C23"],
              rows)
    print(f"wrote {out / 'fig2.csv'}", file=stream)


def _peaks(cfg):
    for g in cfg.gamma_list:
        tau_j, p_j = protocol.peak_success(g, cfg.tau_max, cfg.tau_points)
        tau_c, p_c = protocol.peak_success(g, cfg.tau_max, cfg.tau_points, conditioned=True)
        no_decay = float(protocol.no_decay_probability(tau_j, g))
        yield g, tau_j, p_j, tau_c, p_c, no_decay


def cmd_fig3(cfg, out: Path, stream):
    tau = tau_grid(cfg)
    joint, cond = [], []
    for g in cfg.gamma_list:
        _, pj, pc = protocol.success_probability_curve(tau, g)
        joint.append(pj)
        cond.append(pc)
    header = (["tau_over_pi"] + [f"P_gamma_{rate_label(g)}" for g in cfg.gamma_list]
              + [f"Pcond_gamma_{rate_label(g)}" for g in cfg.gamma_list])
    rows = [[t / math.pi] + [p[i] for p in joint] + [p[i] for p in cond]
            for i, t in enumerate(tau)]
    footer = ["peaks: gamma_over_Gamma,tau_peak_over_pi,P_peak,Pcond_peak"]
    for g, tau_j, p_j, _, p_c, _ in _peaks(cfg):
        footer.append(f"peak,{fmt(g)},{fmt(tau_j / math.pi)},{fmt(p_j)},{fmt(p_c)}")
        print(f"gamma/Gamma = {g:<8g} peak P = {p_j:.4f} at tau/pi = {tau_j / math.pi:.6f}"
              f"  (conditioned {p_c:.4f})", file=stream)
    write_csv(out / "fig3.csv", cfg, header, rows, footer)
    print(f"wrote {out / 'fig3.csv'}", file=stream)


def cmd_protocol(cfg, out: Path, stream):
    p = cfg.physical_params()
    c = derive_couplings(p)
    report = validate_regime(p, c, cfg.thresholds)
    j_over_gamma = tuple(j / p.gamma_laser for j in c.j)
    gammas = [cfg.gamma_spont] + [g for g in cfg.gamma_list if g != cfg.gamma_spont]
    header = ["gamma_over_Gamma", "tau_off_over_pi", "p_no_decay", "p_ground", "p_excited",
              "p_success", "fidelity_bell", "fidelity_bell_sector", "fidelity_recover"]
    rows = []
    for w in report.warnings():
        print(f"WARN {w}", file=stream)
    for g in gammas:
        o = protocol.run_protocol(cfg.tau_off, g, cfg.hold_tau, j_over_gamma)
        rows.append([g, o.turn_off_tau / math.pi, o.p_no_decay, o.p_ground, o.p_excited,
                     o.p_success, o.fidelity_bell, o.fidelity_bell_sector, o.fidelity_recover])
        print(f"gamma/Gamma = {g:g}, turn-off at tau/pi = {o.turn_off_tau / math.pi:g}", file=stream)
        print(f"  p_no_decay     = {o.p_no_decay:.4f}", file=stream)
        print(f"  p_success      = {o.p_success:.4f}   (atom 1 found in g)", file=stream)
        print(f"  fidelity_bell  = {o.fidelity_bell:.4f}", file=stream)
        print(f"  p_failure      = {o.p_no_decay * o.p_excited:.4f}   "
              f"recovered |egg> with fidelity {o.fidelity_recover:.4f}", file=stream)
    write_csv(out / "protocol.csv", cfg, header, rows)


def cmd_sweep(cfg, out: Path, stream):
    rows = list(_peaks(cfg))
    header = ["gamma_over_Gamma", "tau_peak_over_pi", "P_joint_peak", "tau_peak_cond_over_pi",
              "P_conditioned_peak", "p_no_decay_at_peak"]
    rows = [(g, tj / math.pi, pj, tc / math.pi, pc, nd) for g, tj, pj, tc, pc, nd in rows]
    write_csv(out / "sweep.csv", cfg, header, rows)
    print(f"wrote {out / 'sweep.csv'}", file=stream)
    for name in sorted(cfg.emit):
        PRODUCTS[name](cfg, out, stream)


PRODUCTS = {
    "couplings": cmd_couplings,
    "evolution": cmd_evolve,
    "entanglement": cmd_entanglement,
    "protocol": cmd_protocol,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
}

COMMANDS = {
    "couplings": cmd_couplings,
    "evolve": cmd_evolve,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "protocol": cmd_protocol,
    "sweep": cmd_sweep,
}


def _origin(exc):
    """Name of the package module the exception was raised in."""
    frames = traceback.extract_tb(exc.__traceback__)
    return Path(frames[-1].filename).stem if frames else "entangler"


def build_parser():
    ap = argparse.ArgumentParser(prog="entangler",
                                 description="Cavity-fiber Ising ring entanglement simulator")
    ap.add_argument("--version", action="version", version=f"entangler {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", "-c", help="TOML run configuration (defaults if omitted)")
    ap.add_argument("--out", "-o", help="output directory (default: run.output_path)")
    return ap


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"entangler: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"entangler: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"entangler: {_origin(exc)}.{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = Path(args.out or cfg.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out, stream)
    except NumericalError as exc:
        print(f"entangler: {args.command}: {_origin(exc)}.{type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"entangler: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

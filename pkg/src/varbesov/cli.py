"""Command-line interface.

    varbesov run <experiment> [--config file] [--seed S] [--grid N,L]
                 [--scales K,J] [--threads T] [--threshold X] [--out DIR]
                 [--plots]
    varbesov kernels export [--out DIR] [--grid N,L]
    varbesov corpus list [--grid N,L] [--seed S]

Exit codes: 0 run passed, 1 spread over threshold, 2 hypothesis or
configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .besov import HypothesisError
from .calderon import (build_continuous_pair, build_dyadic, build_local_means,
                       export_radial_table, max_dyadic_level)
from .corpus import boundary_mass, build_corpus
from .harness import ConfigError, EXPERIMENTS, HarnessConfig, emit_report, run_experiment


def _add_common(p):
    p.add_argument("--config", help="INI config file")
    p.add_argument("--seed", type=int, help="corpus RNG seed")
    p.add_argument("--grid", help="N,L   (points per axis, half-period)")
    p.add_argument("--scales", help="K,J   (scales per octave, octaves)")
    p.add_argument("--threads", type=int, help="parallel corpus workers")
    p.add_argument("--out", help="output directory")


def _parse_pair(text, name, types):
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--{name} expects two comma-separated values, got {text!r}")
    return types[0](parts[0]), types[1](parts[1])


def _config_from_args(args) -> HarnessConfig:
    cfg = HarnessConfig.from_ini(args.config) if args.config else HarnessConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.grid:
        cfg.N, cfg.L = _parse_pair(args.grid, "grid", (int, float))
    if args.scales:
        cfg.K, cfg.J = _parse_pair(args.scales, "scales", (int, int))
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out:
        cfg.out = args.out
    return cfg


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    if args.threshold is not None:
        key = "lemma" if args.experiment.startswith("lemma:") else args.experiment
        cfg.thresholds[key] = args.threshold
    report = run_experiment(args.experiment, cfg)
    written = emit_report(report, cfg.out, plots=args.plots)
    n_ok = sum(1 for e in report.entries if not e.vacuous)
    print(f"experiment: {report.experiment}")
    print(f"entries: {len(report.entries)} ({n_ok} non-vacuous)")
    print(f"ratio min/max: {report.ratio_min:.6g} / {report.ratio_max:.6g}")
    print(f"spread: {report.spread:.6g}  threshold: {report.threshold:g}")
    print(f"checks: {'ok' if report.checks_ok else 'FAILED'}")
    for path in written:
        print(f"wrote {path}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def cmd_kernels_export(args) -> int:
    cfg = _config_from_args(args)
    spec = cfg.spec()
    scales = cfg.scales()
    os.makedirs(cfg.out, exist_ok=True)
    rmax = spec.xi_max
    for profile in (cfg.profile_a, cfg.profile_b):
        pair = build_continuous_pair(spec, scales, profile=profile)
        export_radial_table(pair.phi0_hat, os.path.join(cfg.out, f"Phi_{profile}.csv"), 2.5)
        export_radial_table(pair.phi_hat, os.path.join(cfg.out, f"phi_{profile}.csv"), 2.5)
    dyad = build_dyadic(spec, max_dyadic_level(spec))
    for v in range(dyad.v_max + 1):
        export_radial_table(dyad.psi_hat(v), os.path.join(cfg.out, f"psi_{v}.csv"),
                            min(2.0 ** (v + 1) * 1.25, rmax))
    kern = build_local_means(cfg.S, cfg.eps, spec)
    export_radial_table(kern.k0_hat, os.path.join(cfg.out, "k0.csv"), 4.0 * cfg.eps)
    export_radial_table(kern.k_hat, os.path.join(cfg.out, "k.csv"), 4.0 * cfg.eps)
    print(f"wrote kernel tables to {cfg.out}")
    return 0


def cmd_corpus_list(args) -> int:
    import numpy as np

    cfg = _config_from_args(args)
    spec = cfg.spec()
    corpus = build_corpus(spec, seed=cfg.seed, names=cfg.corpus_names)
    print(f"{'entry':<16} {'max|f|':>10} {'boundary mass':>14}")
    for name, f in corpus:
        print(f"{name:<16} {np.abs(f.values).max():>10.4f} {boundary_mass(f):>14.3e}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="varbesov",
        description="variable-exponent Besov norm experiments on a periodic torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and emit reports")
    p_run.add_argument("experiment",
                       help=f"one of: {', '.join(EXPERIMENTS)}")
    p_run.add_argument("--threshold", type=float, help="spread threshold override")
    p_run.add_argument("--plots", action="store_true", help="emit plot data + script")
    _add_common(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_k = sub.add_parser("kernels", help="kernel table utilities")
    sub_k = p_k.add_subparsers(dest="kcommand", required=True)
    p_ke = sub_k.add_parser("export", help="export radial kernel tables as CSV")
    _add_common(p_ke)
    p_ke.set_defaults(fn=cmd_kernels_export)

    p_c = sub.add_parser("corpus", help="corpus utilities")
    sub_c = p_c.add_subparsers(dest="ccommand", required=True)
    p_cl = sub_c.add_parser("list", help="list corpus entries and boundary masses")
    _add_common(p_cl)
    p_cl.set_defaults(fn=cmd_corpus_list)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

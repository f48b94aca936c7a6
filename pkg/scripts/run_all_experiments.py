#!/usr/bin/env python3
"""Run every norm-equivalence experiment and lemma sweep, one report
directory per experiment.

    python scripts/run_all_experiments.py [--out reports] [--seed 0]
                                          [--grid N,L] [--scales K,J]

Exit code is the number of failing experiments.
"""

import argparse
import os
import sys
import time

from varbesov.harness import EXPERIMENTS, HarnessConfig, emit_report, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", default=None, help="N,L")
    ap.add_argument("--scales", default=None, help="K,J")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = HarnessConfig(seed=args.seed, threads=args.threads)
    if args.grid:
        n_str, l_str = args.grid.split(",")
        cfg.N, cfg.L = int(n_str), float(l_str)
    if args.scales:
        k_str, j_str = args.scales.split(",")
        cfg.K, cfg.J = int(k_str), int(j_str)

    failures = 0
    for name in EXPERIMENTS:
        t0 = time.monotonic()
        report = run_experiment(name, cfg)
        out_dir = os.path.join(args.out, name.replace(":", "_"))
        emit_report(report, out_dir, plots=True)
        status = "PASS" if report.passed else "FAIL"
        print(f"{status:4s} {name:28s} spread={report.spread:8.3f} "
              f"threshold={report.threshold:g} [{time.monotonic() - t0:6.1f}s] -> {out_dir}")
        failures += 0 if report.passed else 1
    return failures


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point ``socc-lab``."""
from __future__ import annotations

import argparse
import csv
import sys

from .experiments import (BER_COLUMNS, run_amplitude_histogram, run_ber_sweep,
                          run_bounds_export, write_csv)
from .scheme import InvariantViolation
from .zerosum import PEAK_FACTOR_BOUND, build_planemap, induction_bound, invariant_report

EXIT_INVARIANT = 3


def _simulate(args):
    rows = run_ber_sweep(args.config, workers=args.workers)
    write_csv(rows, args.out, BER_COLUMNS)


def _bounds(args):
    write_csv(run_bounds_export(args.config), args.out)


def _histogram(args):
    write_csv(run_amplitude_histogram(args.config), args.out)


def _planemap(args):
    U = build_planemap(args.n)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        for row in U.matrix:
            w.writerow([repr(float(v)) for v in row])
    finally:
        if args.out:
            out.close()
    if args.check:
        rep = invariant_report(U)
        rep["induction_bound"] = induction_bound(args.n)
        for k, v in rep.items():
            print(f"{k}: {v:.6e}", file=sys.stderr)
        bad = (rep["orthogonality_residual"] > 1e-10 or rep["max_column_sum"] > 1e-10
               or rep["inf_norm"] >= PEAK_FACTOR_BOUND
               or rep["inf_norm"] > rep["induction_bound"] + 1e-10)
        if bad:
            raise InvariantViolation(f"plane map U_{args.n} fails its invariants")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="socc-lab",
                                description="Simultaneous over-the-air computation and "
                                            "communication laboratory.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="BER / analog MSE sweep over noise power")
    s.add_argument("--config", required=True, help="JSON scenario file")
    s.add_argument("--out", required=True, help="output CSV")
    s.add_argument("--workers", type=int, default=None, help="override worker count")
    s.set_defaults(func=_simulate)

    b = sub.add_parser("bounds", help="achievable / converse sum-rate curves")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_bounds)

    h = sub.add_parser("histogram", help="peak-amplitude ratio histogram of wrapped codewords")
    h.add_argument("--config", required=True)
    h.add_argument("--out", required=True)
    h.set_defaults(func=_histogram)

    m = sub.add_parser("planemap", help="dump the plane map U_n as CSV")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--check", action="store_true", help="print the invariant report to stderr")
    m.add_argument("--out", default=None, help="CSV file (default: stdout)")
    m.set_defaults(func=_planemap)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

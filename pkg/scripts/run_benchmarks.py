#!/usr/bin/env python3
"""Efficiency sweep: fixed-n extractors by block length, fixed-k by target."""

import argparse
import csv
import sys

from diextract.bench import SourceSpec, bench_fixed_k, bench_fixed_n


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--csv", help="write rows here instead of stdout")
    args = ap.parse_args(argv)

    spec = SourceSpec("coin", args.p, args.seed)
    rows = [["scheme", "size", "trials", "mean", "ratio", "half_width", "mean_iterations"]]
    for scheme in ("vn", "peres", "elias"):
        for log_n in (8, 10, 12, 14):
            r = bench_fixed_n(scheme, spec, 1 << log_n, args.trials, args.workers)
            rows.append([scheme, r.size, r.trials, r.mean, r.ratio, r.half_width, ""])
    for k in (16, 64, 256, 1024):
        r = bench_fixed_k(k, spec, args.trials, args.workers)
        rows.append(["fixed-k", k, r.trials, r.mean, r.ratio, r.half_width, r.mean_iterations])

    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    csv.writer(out).writerows(rows)
    if args.csv:
        out.close()


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Run every exact oracle check at modest sizes and print one line per check."""

import argparse
import sys
from fractions import Fraction

from diextract.coins import EXTRACTORS
from diextract.dice import DieDistribution
from diextract.oracle import (
    enumerate_coin,
    enumerate_die,
    enumerate_phi,
    verify_lemma1_counts,
    verify_uniformity,
)

RHO = {
    3: ("1/5", "3/10", "1/2"),
    4: ("1/10", "1/5", "3/10", "2/5"),
    5: ("1/15", "2/15", "1/5", "4/15", "1/3"),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10, help="max coin length")
    ap.add_argument("--die-n", type=int, default=5, help="max die length")
    args = ap.parse_args(argv)

    failed = 0

    def report(name, ok):
        nonlocal failed
        failed += not ok
        print(f"{'ok  ' if ok else 'FAIL'} {name}")

    for name, psi in EXTRACTORS.items():
        for p in (Fraction(1, 3), Fraction(1, 2), Fraction(7, 10)):
            ok = all(verify_uniformity(enumerate_coin(psi, n, p)).ok for n in range(args.n + 1))
            report(f"uniformity {name} p={p} n<={args.n}", ok)
        ok = all(verify_lemma1_counts(psi, n)[0] for n in range(args.n + 1))
        report(f"class counts {name} n<={args.n}", ok)
        for m, probs in RHO.items():
            rho = DieDistribution.parse(probs)
            ok = all(verify_uniformity(enumerate_die(psi, m, n, rho)).ok for n in range(args.die_n + 1))
            report(f"dice {name} m={m} n<={args.die_n}", ok)
    for k in (1, 2, 3):
        for p in (Fraction(1, 3), Fraction(1, 2)):
            dist, _ = enumerate_phi(k, p, Fraction(1, 2**30))
            report(f"phi_k k={k} p={p} residual={float(dist.residual):.2e}", verify_uniformity(dist).ok)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

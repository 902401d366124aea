"""Randomized verification of the Shannon, Renyi and covariance relations.

Prints a per-relation summary: case count, minimum slack and any violations.
Exit status is 2 if a violation turns up.
"""
import argparse
import sys

import numpy as np

from lctur import symplectic as sp
from lctur.entropy import RenyiOrderPair
from lctur.harness import verify_theorem1, verify_theorem2, verify_theorem3
from lctur.states import correlated_gaussian


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--max-modes", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    pair = RenyiOrderPair.conjugate(args.alpha)
    checks = {
        "theorem1": lambda s, A, B: verify_theorem1(s, A, B),
        "theorem2": lambda s, A, B: verify_theorem2(s, A, B, pair),
        "theorem3": lambda s, A, B: verify_theorem3(s, A, B),
    }
    failed = False
    for name, check in checks.items():
        slacks, statuses = [], {}
        for k in range(args.cases):
            base = args.seed + 3 * k
            n = 1 + k % args.max_modes
            rep = check(correlated_gaussian(n, base), sp.random_symplectic(n, base + 1), sp.random_symplectic(n, base + 2))
            statuses[rep.status] = statuses.get(rep.status, 0) + 1
            if rep.status != "vacuous":
                slacks.append(rep.slack)
        failed |= statuses.get("violation", 0) > 0
        print(f"{name}: cases={args.cases} min_slack={np.min(slacks):.3e} median_slack={np.median(slacks):.3e} statuses={statuses}")
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

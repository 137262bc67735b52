"""Compare rank(Psi(C_L)) with the sum of the spectral ranks for random Psi(x)."""

import argparse
import sys

import numpy as np

from cslnc.ringmat import PolyMatrix, rank_p, spectral_ranks


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--L", type=int, nargs="+", default=[3, 5, 7, 9])
    ap.add_argument("--max-k", type=int, default=4)
    ap.add_argument("--draws", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    mismatches = 0
    for i in range(args.draws):
        L = args.L[i % len(args.L)]
        k = int(rng.integers(1, args.max_k + 1))
        rows = rng.integers(0, args.p, (k, k, L))
        if i % 3 == 0:
            rows[-1] = rows[0]
        psi = PolyMatrix.from_ints(args.p, L, rows.tolist())
        lhs = rank_p(psi.to_matp(), args.p)
        ranks = spectral_ranks(psi)
        mismatches += lhs != sum(ranks.values())
        if args.verbose:
            print(f"L={L} k={k}: rank {lhs}, spectral {list(ranks.values())} -> {sum(ranks.values())}")
    print(f"{args.draws} draws, {mismatches} mismatches")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())

"""Print measured and predicted encoding XORs per data bit for the binary families."""

import argparse
import csv
import sys

from cslnc.sched import BENCH_FIELDS, bench, cost_rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[3, 7, 15])
    ap.add_argument("--L", type=int, nargs="+", default=[5, 7, 13])
    ap.add_argument("--r", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--stripes", type=int, default=20)
    ap.add_argument("--csv", action="store_true", help="emit measured rows as CSV")
    args = ap.parse_args(argv)

    rows = [
        bench(fam, k, L, r, stripes=args.stripes, seed=0)
        for fam in ("evenodd-like", "rdp-like")
        for k in args.k
        for L in args.L
        for r in args.r
    ]
    if args.csv:
        w = csv.DictWriter(sys.stdout, fieldnames=BENCH_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow({k: str(v) for k, v in row.items()})
        return 0
    print(f"{'family':<13}{'k':>4}{'L':>4}{'r':>3}{'measured':>10}{'predicted':>11}{'per bit':>10}{'naive':>8}  match")
    for row in rows:
        print(
            f"{row['family']:<13}{row['k']:>4}{row['L']:>4}{row['r']:>3}{row['measured_xors']:>10}"
            f"{row['predicted_xors']:>11}{float(row['per_bit_measured']):>10.4f}{row['naive_xors']:>8}  {row['outputs_match']}"
        )
    print()
    print("closed-form XORs per bit at (k, L, r) = (15, 5, 3):")
    for row in cost_rows(15, 5, 3):
        print(f"  {row['family']:<13}{str(row['per_bit']):>8}  ({float(row['per_bit']):.4f})")
    bad = [r for r in rows if r["measured_xors"] != r["predicted_xors"] or not r["outputs_match"]]
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

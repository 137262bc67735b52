"""Search every selection of p^m_L distinct nonzero circulants for an MDS code.

At (p, L) = (2, 3) with r = 2 there are 35 selections of 4 generators; none
gives an MDS code with the standard (G, H) or with its (H^T, G^T) twin.
"""

import argparse
import json
import sys

from cslnc.arraycode import falsify_beyond_bound, max_k_bound
from cslnc.fixtures import GRID


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--L", type=int, default=3)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    reports = [falsify_beyond_bound(args.p, args.L, args.r, twin=t).to_json() for t in (False, True)]
    bounds = {f"{p},{L}": max_k_bound(p, L) for p, L in GRID}
    if args.json:
        print(json.dumps({"searches": reports, "bounds": bounds}, indent=2))
    else:
        for rep, name in zip(reports, ("(G, H)", "(H^T, G^T)")):
            print(
                f"{name}: k = {rep['k']} (bound {rep['bound']}), r = {rep['r']}: "
                f"{rep['mds_found']}/{rep['selections']} selections give an MDS code"
            )
        print("maximal k over the grid: " + ", ".join(f"({k})={v}" for k, v in bounds.items()))
    return 1 if any(r["mds_found"] for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())

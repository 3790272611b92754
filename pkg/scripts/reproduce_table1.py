"""Recompute the component counts C and C~ for g = t^n over the desk-scale rows.

Usage: python scripts/reproduce_table1.py [--json out.json] [--quick]
"""

import argparse
import json
import sys

from btquot.analysis import conjecture_check, format_table1, table1_row

ROWS = [(2, n) for n in range(2, 8)] + [(4, 2), (4, 3), (8, 2), (8, 3)]
QUICK = [(2, 2), (2, 3), (2, 4), (4, 2), (8, 2)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", help="also write the rows as JSON here")
    ap.add_argument("--quick", action="store_true", help="only the rows that take seconds")
    args = ap.parse_args(argv)
    rows = []
    for q, n in QUICK if args.quick else ROWS:
        row = table1_row(q, n)
        rows.append(row)
        print(f"q={q} n={n}: C={row.C} C~={row.C_tilde} via {row.method} "
              f"({row.seconds:.1f}s) {conjecture_check(row)['status']}", file=sys.stderr)
    print(format_table1(rows, timings=True), end="")
    mismatches = [r for r in rows if r.matches_reference is False]
    for r in mismatches:
        print(f"MISMATCH q={r.q} n={r.n}: computed {(r.C, r.C_tilde)} vs reference {r.reference}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_dict() for r in rows], fh, indent=1, sort_keys=True)
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())

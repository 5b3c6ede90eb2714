"""Oracle, indicator and duplicate checks on every column for a range of sizes.

usage: python3 scripts/verify_all.py [--samples 50] [--seed 0]
"""

import argparse
import sys

from omega_matroids.cli import verify_matrix

RANGES = {2: range(4, 10), 3: range(5, 8)}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    failed = False
    for r, ns in RANGES.items():
        for n in ns:
            fails = verify_matrix(r, n, args.samples, args.seed, use_cache=False)
            print(f"rank={r} n={n} {'ok' if not fails else 'FAIL'}", flush=True)
            for f in fails:
                print("   ", f)
            failed |= bool(fails)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()

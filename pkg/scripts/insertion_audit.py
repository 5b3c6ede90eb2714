"""Replay every rank-3 insertion up to n and tally how often each insertion case fires.

Any closed-form/oracle disagreement raises, so a clean run is itself the audit.
usage: python3 scripts/insertion_audit.py [--n 7]
"""

import argparse
from collections import Counter

from omega_matroids.rank3 import enumerate_rank3_column_states

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=7)
    args = ap.parse_args()
    for n in range(4, args.n + 1):
        states = enumerate_rank3_column_states(n, validate=True, strict=True)
        cases = Counter(rec.case for s in states for rec in s.history)
        exc = sum(rec.exceptional for s in states for rec in s.history)
        print(f"n={n} states={len(states)} cases={dict(sorted(cases.items()))} exceptional={exc}")

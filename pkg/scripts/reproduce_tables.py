"""Recompute the rank-2 and rank-3 summary tables and compare them with the stored values.

usage: python3 scripts/reproduce_tables.py [--rank2-to 15] [--rank3-to 8]
"""

import argparse
import time

from omega_matroids.cli import compare_row, expected_tables, table_row


def run(rank, lo, hi, vertices_to):
    expected = expected_tables()
    for n in range(lo, hi + 1):
        t0 = time.perf_counter()
        row = table_row(rank, n, vertices=n <= vertices_to)
        bad = compare_row(rank, row, expected)
        fields = " ".join(f"{k}={v}" for k, v in row.items())
        print(f"rank={rank} {fields} [{time.perf_counter() - t0:.1f}s] {'MISMATCH ' + '; '.join(bad) if bad else 'ok'}",
              flush=True)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--rank2-to", type=int, default=15)
    ap.add_argument("--rank3-to", type=int, default=8)
    ap.add_argument("--rank2-vertices-to", type=int, default=15, help="skip vertex counts above this n")
    args = ap.parse_args()
    run(2, 9, args.rank2_to, args.rank2_vertices_to)
    run(3, 5, args.rank3_to, 8)

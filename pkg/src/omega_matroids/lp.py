"""Exact phase-1 simplex for feasibility of Ax = b, x >= 0.

The tableau is kept integral by fraction-free (Bareiss style) pivoting: every
entry equals D times the rational tableau entry, where D is the last pivot.
Bland's smallest-index rule prevents cycling, so the procedure always
terminates with either a feasible point or a Farkas certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class LPResult:
    feasible: bool
    x: list[Fraction] | None = None  # primal point when feasible
    y: list[Fraction] | None = None  # y^T A >= 0 and y^T b < 0 when infeasible
    pivots: int = 0


def _pivot(T: list[list[int]], r: int, s: int, D: int) -> int:
    prs = T[r][s]
    row_r = T[r]
    for i, row in enumerate(T):
        if i == r:
            continue
        a = row[s]
        if a == 0:
            T[i] = [(v * prs) // D for v in row] if prs != D else row
            continue
        T[i] = [(v * prs - a * w) // D for v, w in zip(row, row_r)]
    return prs


def feasibility(A: Sequence[Sequence[int]], b: Sequence[int]) -> LPResult:
    """Decide whether Ax = b has a solution with x >= 0, exactly."""
    m = len(A)
    nvar = len(A[0]) if m else 0
    signs = [1 if bi >= 0 else -1 for bi in b]
    # columns: structural 0..nvar-1, artificial nvar..nvar+m-1, rhs last
    T: list[list[int]] = []
    for i in range(m):
        s = signs[i]
        row = [s * int(v) for v in A[i]] + [0] * m + [s * int(b[i])]
        row[nvar + i] = 1
        T.append(row)
    obj = [0] * (nvar + m + 1)
    for row in T:
        for j in range(nvar):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    T.append(obj)
    basis = [nvar + i for i in range(m)]
    D = 1
    pivots = 0
    ncols = nvar + m
    while True:
        o = T[m]
        s = next((j for j in range(ncols) if o[j] < 0), None)
        if s is None:
            break
        r = None
        for i in range(m):
            a = T[i][s]
            if a > 0:
                if r is None:
                    r = i
                    continue
                # compare T[i][rhs]/a with T[r][rhs]/T[r][s]
                lhs = T[i][-1] * T[r][s]
                rhs = T[r][-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[r]):
                    r = i
        if r is None:  # unbounded direction cannot occur in phase 1 (objective bounded below by 0)
            raise AssertionError("phase-1 objective unbounded")
        D = _pivot(T, r, s, D)
        basis[r] = s
        pivots += 1
    value = Fraction(-T[m][-1], D)
    if value == 0:
        x = [Fraction(0)] * nvar
        for i, v in enumerate(basis):
            if v < nvar:
                x[v] = Fraction(T[i][-1], D)
        return LPResult(True, x=x, pivots=pivots)
    # duals of the sign-adjusted system: y_i = 1 - reduced cost of artificial i
    y = [-(1 - Fraction(T[m][nvar + i], D)) * signs[i] for i in range(m)]
    return LPResult(False, y=y, pivots=pivots)

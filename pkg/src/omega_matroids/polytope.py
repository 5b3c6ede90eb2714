"""Exact post-processing of finite integer point sets: dedup, affine dimension
and vertex tests with re-verifiable certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .core import InvalidArgumentsError, MatroidDescriptor, SparseIntMatrix
from .lp import feasibility


@dataclass
class PointSet:
    ambient_dim: int
    points: list[tuple[int, ...]]
    labels: list = field(default_factory=list)
    merged: dict[int, list] = field(default_factory=dict)  # index -> labels of dropped duplicates

    def __post_init__(self):
        if any(len(p) != self.ambient_dim for p in self.points):
            raise InvalidArgumentsError("all points need the ambient dimension")
        if not self.labels:
            self.labels = [None] * len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_matrix(cls, m: SparseIntMatrix) -> "PointSet":
        return cls(m.shape[0], m.dense_columns(), m.descriptors())


def dedup_points(ps: PointSet) -> PointSet:
    """Drop exact duplicates, keeping the first label and recording the rest."""
    seen: dict[tuple[int, ...], int] = {}
    pts, labs = [], []
    merged: dict[int, list] = {}
    for p, lab in zip(ps.points, ps.labels):
        if p in seen:
            merged.setdefault(seen[p], []).append(lab)
            continue
        seen[p] = len(pts)
        pts.append(p)
        labs.append(lab)
    for i, extra in ps.merged.items():
        merged.setdefault(seen[ps.points[i]], []).extend(extra)
    return PointSet(ps.ambient_dim, pts, labs, merged)


_PRIME = 2_147_483_647


def _rank_mod_p(A: np.ndarray) -> int:
    """Rank over GF(p) of an int64 matrix with entries already reduced mod p."""
    A = A.copy()
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(A[rank:, c])[0]
        if not len(nz):
            continue
        piv = rank + nz[0]
        A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), _PRIME - 2, _PRIME)
        A[rank] = A[rank] * inv % _PRIME
        below = A[rank + 1:, c].copy()
        if below.any():
            # split the pivot row to keep products below 2**63
            lo, hi = A[rank] & 0xFFFF, A[rank] >> 16
            upd = (np.outer(below, lo) + (np.outer(below, hi) % _PRIME << 16)) % _PRIME
            A[rank + 1:] = (A[rank + 1:] - upd) % _PRIME
        rank += 1
    return rank


def rank_lower_bound(rows, seed: int = 0, target: int | None = None) -> int:
    """rank_p of a row subset or of a random integer sketch R A; never exceeds the rational rank of A."""
    A = np.asarray(rows, dtype=np.int64)
    if A.size == 0:
        return 0
    k = A.shape[1] + 8
    if A.shape[0] <= k:
        return _rank_mod_p(A % _PRIME)
    rng = np.random.default_rng(seed)
    # cheap first try: the leading rows plus a random sample
    pick = np.unique(np.concatenate([np.arange(k), rng.choice(A.shape[0], size=k, replace=False)]))
    r = _rank_mod_p(A[pick] % _PRIME)
    if target is not None and r >= target:
        return r
    R = rng.integers(0, 1 << 10, size=(k, A.shape[0]), dtype=np.int64)
    if (1 << 10) * int(np.abs(A).max()) * A.shape[0] < 1 << 53:
        # every partial sum is an integer below 2**53, so the float product is exact
        S = np.rint(R.astype(np.float64) @ A.astype(np.float64)).astype(np.int64)
    else:
        S = R @ A
    return max(r, _rank_mod_p(S % _PRIME))


def _bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    M = [list(r) for r in rows if any(r)]
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for i in range(rank + 1, len(M)):
            a = M[i][c]
            M[i] = [(v * p - a * w) // prev for v, w in zip(M[i], M[rank])]
        prev = p
        rank += 1
        if rank == len(M):
            break
    return rank


def integer_rank(rows: Sequence[Sequence[int]], upper: int | None = None) -> int:
    """Exact rank of an integer matrix.

    A modular sketch gives a lower bound; if it meets ``upper`` (or the trivial bound)
    that is the rank, otherwise fall back to fraction-free elimination.
    """
    A = np.asarray(rows, dtype=object if not len(rows) else None)
    if A.size == 0 or not A.any():
        return 0
    bound = min(A.shape)
    if upper is not None:
        bound = min(bound, upper)
    if A.dtype.kind == "i" and np.abs(A).max() < 1 << 20 and rank_lower_bound(A, target=bound) == bound:
        return bound
    return _bareiss_rank([list(map(int, r)) for r in A])


def affine_dimension(ps: PointSet) -> int:
    if not ps.points:
        raise InvalidArgumentsError("affine dimension of an empty set")
    P = np.array(ps.points, dtype=np.int64)
    if len(P) == 1:
        return 0
    # equal coordinate sums put every difference in a hyperplane
    sums = P.sum(axis=1)
    upper = ps.ambient_dim - 1 if (sums == sums[0]).all() else None
    return integer_rank(P[1:] - P[0], upper)


def linear_rank(ps: PointSet) -> int:
    """Rank of the matrix whose columns are the points; affine dimension + 1 unless 0 lies in the affine hull."""
    return integer_rank(ps.points)


# -- vertex tests --------------------------------------------------------------------------


@dataclass
class VertexCertificate:
    """Either a separating hyperplane c.p < t <= c.q for all other q, or convex weights."""

    index: int
    is_vertex: bool
    normal: list[Fraction] | None = None
    threshold: Fraction | None = None
    weights: dict[int, Fraction] | None = None

    def verify(self, ps: PointSet) -> bool:
        p = ps.points[self.index]
        if self.is_vertex:
            c, t = self.normal, self.threshold
            if c is None or t is None or len(c) != ps.ambient_dim:
                return False
            # scale to integers and keep only the support of the normal
            den = lcm(t.denominator, *(ci.denominator for ci in c))
            sparse = [(k, int(ci * den)) for k, ci in enumerate(c) if ci]
            ti = int(t * den)
            if not sum(ci * p[k] for k, ci in sparse) < ti:
                return False
            return all(
                sum(ci * q[k] for k, ci in sparse) >= ti for j, q in enumerate(ps.points) if j != self.index
            )
        w = self.weights
        if not w or self.index in w or any(v < 0 for v in w.values()) or sum(w.values()) != 1:
            return False
        return all(
            sum(v * ps.points[j][k] for j, v in w.items()) == p[k] for k in range(ps.ambient_dim)
        )

    def to_json(self) -> dict:
        out = {"index": self.index, "vertex": self.is_vertex}
        if self.is_vertex:
            out["normal"] = [str(v) for v in self.normal]
            out["threshold"] = str(self.threshold)
        else:
            out["weights"] = {str(k): str(v) for k, v in sorted(self.weights.items())}
        return out


def row_components(ps: PointSet) -> list[tuple[list[int], list[int]]]:
    """Connected components (rows, point indices) of the row-support bipartite graph."""
    parent = list(range(ps.ambient_dim))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    supports = [[k for k, v in enumerate(p) if v] for p in ps.points]
    for sup in supports:
        for k in sup[1:]:
            ra, rb = find(sup[0]), find(k)
            if ra != rb:
                parent[ra] = rb
    comps: dict[int, tuple[list[int], list[int]]] = {}
    for j, sup in enumerate(supports):
        root = find(sup[0]) if sup else -1
        comps.setdefault(root, ([], []))[1].append(j)
    for k in range(ps.ambient_dim):
        root = find(k)
        if root in comps:
            comps[root][0].append(k)
    return [comps[r] for r in sorted(comps)]


def _splittable(ps: PointSet) -> bool:
    """Components may be treated separately when every point has the same positive coordinate sum."""
    sums = {sum(p) for p in ps.points}
    return len(sums) == 1 and next(iter(sums)) > 0 and all(any(p) for p in ps.points)


def _unit_certificate(ps: PointSet, idx: int, pool: Sequence[int]) -> VertexCertificate | None:
    p = ps.points[idx]
    for k in range(ps.ambient_dim):
        best_other_max = max(ps.points[j][k] for j in pool if j != idx)
        if p[k] > best_other_max:
            c = [Fraction(0)] * ps.ambient_dim
            c[k] = Fraction(-1)
            return VertexCertificate(idx, True, c, Fraction(-best_other_max))
        best_other_min = min(ps.points[j][k] for j in pool if j != idx)
        if p[k] < best_other_min:
            c = [Fraction(0)] * ps.ambient_dim
            c[k] = Fraction(1)
            return VertexCertificate(idx, True, c, Fraction(best_other_min))
    return None


def _lp_certificate(ps: PointSet, idx: int, pool: Sequence[int], rows: Sequence[int]) -> VertexCertificate:
    """Decide p in conv(pool minus p) using coordinates ``rows`` plus the affine row."""
    others = [j for j in pool if j != idx]
    p = ps.points[idx]
    if not others:
        c = [Fraction(0)] * ps.ambient_dim
        return VertexCertificate(idx, True, c, Fraction(1))
    A = [[ps.points[j][k] for j in others] for k in rows] + [[1] * len(others)]
    b = [p[k] for k in rows] + [1]
    res = feasibility(A, b)
    if res.feasible:
        w = {j: v for j, v in zip(others, res.x) if v}
        return VertexCertificate(idx, False, weights=w)
    y = res.y
    # y.(q, 1) >= 0 for every other q and y.(p, 1) < 0: normal y[:rows], threshold -y_last
    c = [Fraction(0)] * ps.ambient_dim
    for k, v in zip(rows, y):
        c[k] = v
    return VertexCertificate(idx, True, c, -y[-1])


def _lift(cert: VertexCertificate, rows: Sequence[int], total: int) -> VertexCertificate:
    """Fold the threshold into the component rows so points of other components pass at 0."""
    if not cert.is_vertex:
        return cert
    shift = cert.threshold / total
    c = list(cert.normal)
    for k in rows:
        c[k] -= shift
    return VertexCertificate(cert.index, True, c, Fraction(0))


def vertex_certificate(ps: PointSet, idx: int, _comp=None) -> VertexCertificate:
    if not 0 <= idx < len(ps.points):
        raise IndexError(idx)
    if _comp is None:
        if _splittable(ps):
            for rows, pool in row_components(ps):
                if idx in pool:
                    _comp = (rows, pool)
                    break
        else:
            _comp = (list(range(ps.ambient_dim)), list(range(len(ps.points))))
    rows, pool = _comp
    split = len(pool) != len(ps.points)
    cert = _unit_certificate(ps, idx, pool) if len(pool) > 1 else None
    if cert is None:
        cert = _lp_certificate(ps, idx, pool, rows)
    if split and cert.is_vertex:
        cert = _lift(cert, rows, sum(ps.points[idx]))
    return cert


def is_vertex(ps: PointSet, idx: int) -> bool:
    return vertex_certificate(ps, idx).is_vertex


@dataclass
class VertexReport:
    vertices: list[int]
    certificates: list[VertexCertificate]

    def all_verified(self, ps: PointSet) -> bool:
        return all(c.verify(ps) for c in self.certificates)


def vertex_report(ps: PointSet, verify: bool = True) -> VertexReport:
    """Vertex decision for every point, each with a certificate (re-verified when asked)."""
    if len(set(ps.points)) != len(ps.points):
        raise InvalidArgumentsError("vertex tests need a deduplicated point set")
    comps = row_components(ps) if _splittable(ps) else [
        (list(range(ps.ambient_dim)), list(range(len(ps.points))))
    ]
    certs: list[VertexCertificate | None] = [None] * len(ps.points)
    for rows, pool in comps:
        for idx in pool:
            certs[idx] = vertex_certificate(ps, idx, (rows, pool))
    if verify:
        for c in certs:
            if not c.verify(ps):
                raise AssertionError(f"certificate for point {c.index} failed to verify")
    return VertexReport([c.index for c in certs if c.is_vertex], certs)

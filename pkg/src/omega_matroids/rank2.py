"""Rank-2 matroids: Schubert classification, profiles, counting and the
recursive generator matrix O_{2,n}."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .core import (
    CyclicFlatLattice,
    ExpansionVector,
    InvalidArgumentsError,
    InvalidDescriptorError,
    MatroidDescriptor,
    SchubertLabel,
    SparseIntMatrix,
    rank2_lattice,
    schubert_lattice,
)


def partitions(n: int, min_part: int = 1, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as non-increasing tuples with parts in [min_part, max_part]."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), min_part - 1, -1):
        for rest in partitions(n - first, min_part, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def rho(n: int) -> int:
    """Partitions of n into parts >= 2, the single part n included."""
    return sum(1 for _ in partitions(n, 2))


@dataclass(frozen=True)
class Rank2Profile:
    """Isomorphism class of a rank-2 matroid on [n].

    ``singletons`` counts non-loop elements in no parallel class of size >= 2.
    """

    n: int
    loops: int = 0
    parallel_sizes: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parallel_sizes", tuple(sorted(self.parallel_sizes, reverse=True)))
        if any(s < 2 for s in self.parallel_sizes):
            raise InvalidDescriptorError(f"parallel classes need size >= 2, got {self.parallel_sizes}")
        if self.loops < 0 or self.singletons < 0:
            raise InvalidDescriptorError(f"profile does not fit into [{self.n}]")
        if self.p + self.singletons < 2:
            raise InvalidDescriptorError("fewer than two points: not a rank-2 matroid")

    @property
    def p(self) -> int:
        return len(self.parallel_sizes)

    @property
    def singletons(self) -> int:
        return self.n - self.loops - sum(self.parallel_sizes)

    @property
    def multiplicities(self) -> Counter:
        """n_k: number of parallel classes of size k."""
        return Counter(self.parallel_sizes)

    def descriptor(self) -> MatroidDescriptor:
        return MatroidDescriptor.rank2(self.n, self.loops, self.parallel_sizes)

    def lattice(self) -> CyclicFlatLattice:
        return rank2_lattice(self.n, self.loops, self.parallel_sizes)

    def schubert_label(self) -> SchubertLabel | None:
        """The Schubert label when Z(M) is a chain (at most one class), else None."""
        l, n = self.loops, self.n
        if self.p == 0:
            return SchubertLabel((l + 1, l + 2), n)
        if self.p == 1:
            k = self.parallel_sizes[0]
            if self.singletons == 1:
                return SchubertLabel((l + 1, n), n)
            return SchubertLabel((l + 1, l + k + 1), n)
        return None


def enumerate_profiles(n: int) -> list[Rank2Profile]:
    """Every rank-2 isomorphism class on [n], by brute force over loops and partitions."""
    out = []
    for l in range(0, n - 1):
        for m in range(0, n - l + 1):
            for parts in partitions(m, 2):
                s = n - l - m
                if len(parts) + s >= 2:
                    out.append(Rank2Profile(n, l, parts))
    return out


# -- Schubert classification ---------------------------------------------------------------


@dataclass(frozen=True)
class Rank2Class:
    kind: int
    params: tuple[int, ...]
    lattice: CyclicFlatLattice = field(repr=False, compare=False)


def classify_rank2_schubert(label: SchubertLabel) -> Rank2Class:
    """Sort S(k1, k2) on [n] into the four families.

    1. S(n-1, n): only the loops [n-2] are cyclic.
    2. S(k, k+1), k < n-1: loops [k-1] and the full set.
    3. S(k, n), k < n-1: loops [k-1] and a parallel class [k, n-1]; n is a coloop.
    4. k1 + 1 < k2 <= n-1: loops [k1-1], parallel class [k1, k2-1] and [n].
    """
    if label.r != 2:
        raise InvalidArgumentsError(f"expected a rank-2 label, got {label}")
    (k1, k2), n = label.xs, label.n
    z = schubert_lattice(label)
    if (k1, k2) == (n - 1, n):
        return Rank2Class(1, (), z)
    if k2 == k1 + 1:
        return Rank2Class(2, (k1,), z)
    if k2 == n:
        return Rank2Class(3, (k1,), z)
    return Rank2Class(4, (k1, k2), z)


# -- expansions ----------------------------------------------------------------------------


def rank2_expansion(profile: Rank2Profile) -> ExpansionVector:
    """(1 - p) at S(l+1, l+2) plus n_k at S(l+1, l+k+1) for each class size k."""
    l, n = profile.loops, profile.n
    coeffs: dict[tuple[int, int], int] = {(l + 1, l + 2): 1 - profile.p}
    for k, nk in profile.multiplicities.items():
        key = (l + 1, l + k + 1)
        coeffs[key] = coeffs.get(key, 0) + nk
    return ExpansionVector.from_xs(2, n, coeffs)


def count_m2_bruteforce(n: int) -> int:
    return len(enumerate_profiles(n))


@lru_cache(maxsize=None)
def count_m2(n: int) -> int:
    """|M_{2,n}| = 2|M_{2,n-1}| - |M_{2,n-2}| + rho(n) for n >= 4."""
    if n < 2:
        raise InvalidArgumentsError(f"rank 2 needs n >= 2, got {n}")
    if n < 4:
        return count_m2_bruteforce(n)
    # iterate to keep the recursion depth flat for large n
    a, b = count_m2(2), count_m2(3)
    for k in range(4, n + 1):
        a, b = b, 2 * b - a + rho(k)
    return b


# -- the block recursion -------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionMatrix:
    """Columns are multiplicity vectors over the part sizes n-1, ..., 2."""

    n: int
    columns: tuple[tuple[int, ...], ...]

    @property
    def part_sizes(self) -> tuple[int, ...]:
        return tuple(range(self.n - 1, 1, -1))

    @property
    def shape(self) -> tuple[int, int]:
        return self.n - 2, len(self.columns)

    def partition(self, j: int) -> tuple[int, ...]:
        return tuple(k for k, u in zip(self.part_sizes, self.columns[j]) for _ in range(u))


def build_partition_matrix(n: int) -> PartitionMatrix:
    if n < 4:
        raise InvalidArgumentsError(f"the partition matrix needs n >= 4, got {n}")
    sizes = list(range(n - 1, 1, -1))
    cols = []
    for parts in partitions(n, 2, n - 1):
        c = Counter(parts)
        cols.append(tuple(c.get(k, 0) for k in sizes))
    return PartitionMatrix(n, tuple(sorted(cols, reverse=True)))


@dataclass(frozen=True)
class VBlock:
    """The loopless coloop-free-class block: rows S(1,n), ..., S(1,2)."""

    n: int
    columns: tuple[tuple[int, ...], ...]
    profiles: tuple[Rank2Profile, ...]


def build_v(n: int) -> VBlock:
    """V(n) = [[0; V(n-1)] | [U(n); 1 - 1^T U(n)]], starting from V(4) = (0, 2, -1)^T."""
    if n < 4:
        raise InvalidArgumentsError(f"V(n) needs n >= 4, got {n}")
    if n == 4:
        return VBlock(4, ((0, 2, -1),), (Rank2Profile(4, 0, (2, 2)),))
    prev = build_v(n - 1)
    cols = [(0,) + c for c in prev.columns]
    profs = [Rank2Profile(n, 0, p.parallel_sizes) for p in prev.profiles]
    U = build_partition_matrix(n)
    for j, u in enumerate(U.columns):
        cols.append(tuple(u) + (1 - sum(u),))
        profs.append(Rank2Profile(n, 0, U.partition(j)))
    return VBlock(n, tuple(cols), tuple(profs))


def _shift_descriptor(d: MatroidDescriptor, n: int) -> MatroidDescriptor:
    """Add one loop in front."""
    if d.kind == "schubert":
        return MatroidDescriptor.schubert(SchubertLabel(tuple(x + 1 for x in d.label.xs), n))
    return MatroidDescriptor.rank2(n, d.loops + 1, d.parallel_sizes)


@lru_cache(maxsize=None)
def _build_o2(n: int) -> SparseIntMatrix:
    if n == 2:
        lab = SchubertLabel((1, 2), 2)
        return SparseIntMatrix(2, 2, [(ExpansionVector.unit(lab), MatroidDescriptor.schubert(lab))])
    prev = _build_o2(n - 1)
    m = SparseIntMatrix(2, n)
    for vec, d in prev.columns:
        m.append(vec.relabel(n, lambda xs: tuple(x + 1 for x in xs)), _shift_descriptor(d, n))
    for k in range(n, 1, -1):
        lab = SchubertLabel((1, k), n)
        m.append(ExpansionVector.unit(lab), MatroidDescriptor.schubert(lab))
    if n >= 4:
        rows = [SchubertLabel((1, k), n) for k in range(n, 1, -1)]
        V = build_v(n)
        for col, prof in zip(V.columns, V.profiles):
            vec = ExpansionVector(2, n, tuple((lab, c) for lab, c in zip(rows, col)))
            m.append(vec, prof.descriptor())
    return m


def build_o2(n: int) -> SparseIntMatrix:
    """O_{2,n} = [[O_{2,n-1}, 0], [0, I_{n-1}, V(n)]] with descriptors per column."""
    if n < 2:
        raise InvalidArgumentsError(f"rank 2 needs n >= 2, got {n}")
    src = _build_o2(n)
    return SparseIntMatrix(2, n, list(src.columns))


def descriptor_profile(d: MatroidDescriptor) -> Rank2Profile:
    """Profile of a rank-2 descriptor, Schubert ones included."""
    if d.kind == "rank2":
        return Rank2Profile(d.n, d.loops, d.parallel_sizes)
    if d.kind != "schubert" or d.label.r != 2:
        raise InvalidArgumentsError(f"not a rank-2 descriptor: {d}")
    (k1, k2), n = d.label.xs, d.n
    loops = k1 - 1
    cls = classify_rank2_schubert(d.label)
    if cls.kind in (1, 2):
        return Rank2Profile(n, loops, ())
    if cls.kind == 3:
        return Rank2Profile(n, loops, (n - k1,))
    return Rank2Profile(n, loops, (k2 - k1,))


def extremal_rank2(n: int, certificates: bool = False):
    """Descriptors of the columns of O_{2,n} that are vertices of their hull."""
    from .polytope import PointSet, vertex_report

    m = build_o2(n)
    ps = PointSet.from_matrix(m)
    rep = vertex_report(ps)
    out = [ps.labels[i] for i in rep.vertices]
    return (out, rep) if certificates else out

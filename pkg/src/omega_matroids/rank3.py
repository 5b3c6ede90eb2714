"""Rank-3 matroids: covers by inseparable flats, the parallel-insertion engine
and the generator matrix O_{3,n}.

A loopless rank-3 matroid is its simplification (a set of points with lines of
size >= 3, the *cover*) plus a multiplicity per point.  States are grown from
the simple matroid by inserting parallel copies one element at a time; every
insertion updates the Schubert coefficients in closed form, and the result is
compared against the Moebius oracle.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .core import (
    CyclicFlat,
    CyclicFlatLattice,
    ExpansionVector,
    InvalidArgumentsError,
    MatroidDescriptor,
    SchubertLabel,
    SparseIntMatrix,
    UnsupportedRankError,
    descriptor_to_lattice,
    to_mask,
)
from .expansion import schubert_expansion_oracle
from .lattice import canonical_form, canonical_set_system, popcount, rank_from_cyclic_flats
from .rank2 import build_o2, descriptor_profile

log = logging.getLogger(__name__)


# -- covers --------------------------------------------------------------------------------


@dataclass(frozen=True)
class Cover:
    """Lines (size >= 3) of a simple rank-3 matroid on [n]."""

    n: int
    flats: tuple[tuple[int, ...], ...] = ()
    canonical: bool = False

    def __post_init__(self):
        flats = tuple(sorted(tuple(sorted(f)) for f in self.flats))
        object.__setattr__(self, "flats", flats)
        if self.n < 3:
            raise InvalidArgumentsError("a rank-3 simple matroid needs at least 3 points")
        for f in flats:
            if not 3 <= len(f) <= self.n - 1 or f[0] < 1 or f[-1] > self.n:
                raise InvalidArgumentsError(f"line {f} must have 3..{self.n - 1} points of [{self.n}]")
        for a, b in combinations(flats, 2):
            if len(set(a) & set(b)) > 1:
                raise InvalidArgumentsError(f"lines {a} and {b} meet in more than one point")

    @property
    def masks(self) -> list[int]:
        return [to_mask(f) for f in self.flats]

    @property
    def t(self) -> int:
        return len(self.flats)

    def t_k(self) -> Counter:
        return Counter(len(f) for f in self.flats)

    def coloops(self) -> list[int]:
        if self.n == 3:
            return [1, 2, 3]
        full = set(range(1, self.n + 1))
        return [v for v in full if any(set(f) == full - {v} for f in self.flats)]

    def key(self) -> tuple:
        cert, _ = canonical_set_system(self.n, [(m, 0) for m in self.masks])
        return cert

    def canonicalize(self) -> "Cover":
        _, relabel = canonical_set_system(self.n, [(m, 0) for m in self.masks])
        return Cover(self.n, tuple(tuple(relabel[e - 1] for e in f) for f in self.flats), True)

    def lattice(self) -> CyclicFlatLattice:
        """Cyclic flats of the simple matroid: the empty set, the lines, and [n] unless a coloop exists."""
        full = tuple(range(1, self.n + 1))
        pairs = [((), 0)] + [(f, 2) for f in self.flats]
        if not self.coloops():
            pairs.append((full, 3))
        return CyclicFlatLattice.from_sets(self.n, pairs, 3)

    def __str__(self) -> str:
        return "{" + ", ".join("".join(map(str, f)) if self.n < 10 else str(list(f)) for f in self.flats) + f"}} on [{self.n}]"


def _extensions(cover: Cover) -> Iterable[Cover]:
    """Add point i+1 to a cover on [i] in every way keeping rank 3."""
    i = cover.n
    new = i + 1
    lines = [set(f) for f in cover.flats]
    collinear = set()
    for f in cover.flats:
        for a, b in combinations(f, 2):
            collinear.add((a, b))
    pairs = [(a, b) for a, b in combinations(range(1, i + 1), 2) if (a, b) not in collinear]
    blocks = [frozenset(f) for f in lines if len(f) < i] + [frozenset(p) for p in pairs]

    def choose(start: int, used: frozenset, chosen: list):
        yield list(chosen)
        for j in range(start, len(blocks)):
            b = blocks[j]
            if b & used:
                continue
            chosen.append(b)
            yield from choose(j + 1, used | b, chosen)
            chosen.pop()

    for chosen in choose(0, frozenset(), []):
        ext = {frozenset(b) for b in chosen}
        out = [tuple(sorted(b | {new})) for b in chosen]
        out += [tuple(sorted(f)) for f in lines if frozenset(f) not in ext]
        yield Cover(new, tuple(out))


@lru_cache(maxsize=None)
def cycle_covers(i: int) -> tuple[Cover, ...]:
    """Every simple rank-3 matroid on [i] up to isomorphism, as canonical covers."""
    if i < 3:
        raise InvalidArgumentsError(f"covers need i >= 3, got {i}")
    if i == 3:
        return (Cover(3, (), True),)
    found: dict[tuple, Cover] = {}
    candidates = [c for prev in cycle_covers(i - 1) for c in _extensions(prev)]
    candidates.append(Cover(i, (tuple(range(1, i)),)))  # all but one point on a line
    for c in candidates:
        k = c.key()
        if k not in found:
            found[k] = c.canonicalize()
    return tuple(sorted(found.values(), key=lambda c: (len(c.flats), [len(f) for f in c.flats], c.flats)))


def covers_bruteforce(i: int) -> list[Cover]:
    """All families of 3..(i-1)-subsets of [i] meeting pairwise in <= 1 point, up to isomorphism."""
    cands = [frozenset(c) for k in range(3, i) for c in combinations(range(1, i + 1), k)]
    found: dict[tuple, Cover] = {}

    def grow(start: int, chosen: list):
        c = Cover(i, tuple(tuple(sorted(f)) for f in chosen))
        k = c.key()
        if k not in found:
            found[k] = c
        for j in range(start, len(cands)):
            f = cands[j]
            if all(len(f & g) <= 1 for g in chosen):
                chosen.append(f)
                grow(j + 1, chosen)
                chosen.pop()

    grow(0, [])
    return list(found.values())


def simple_coefficients(c: Cover, n_total: int | None = None) -> ExpansionVector:
    """1 - t at S(1,2,3) and t_k at S(1,2,k+1) for a simple matroid with t lines, t_k of size k.

    With ``n_total`` larger than the cover size the labels are placed on
    [n_total]; this is only meaningful when the simple matroid has no coloops,
    since only then the labels do not depend on the ground set.
    """
    n = c.n if n_total is None else n_total
    if n < c.n:
        raise InvalidArgumentsError("n_total must be at least the cover size")
    if n != c.n and c.coloops():
        raise InvalidArgumentsError("a simple matroid with coloops has labels tied to its own ground set")
    coeffs: Counter = Counter({(1, 2, 3): 1 - c.t})
    for k, tk in c.t_k().items():
        coeffs[(1, 2, k + 1)] += tk
    return ExpansionVector.from_xs(3, n, coeffs)


# -- statistics of a loopless rank-3 lattice -----------------------------------------------


@dataclass
class Rank3Stats:
    """Counts read off the lattice of a loopless rank-3 matroid."""

    n: int
    coloops: int
    classes: list[int]  # masks of parallel classes
    insep: list[int]  # masks of inseparable rank-2 cyclic flats
    sep: list[int]  # masks of separable rank-2 cyclic flats
    top: int

    @property
    def p(self) -> int:
        return len(self.classes)

    @property
    def p_k(self) -> Counter:
        return Counter(popcount(c) for c in self.classes)

    def contained(self, cls: int) -> bool:
        return any(cls & ~f == 0 for f in self.insep)

    @property
    def p_c_k(self) -> Counter:
        return Counter(popcount(c) for c in self.classes if self.contained(c))

    @property
    def p_u_k(self) -> Counter:
        return Counter(popcount(c) for c in self.classes if not self.contained(c))

    @property
    def t(self) -> int:
        return len(self.insep)

    def class_of(self, e: int) -> int | None:
        bit = 1 << (e - 1)
        return next((c for c in self.classes if c & bit), None)

    def insep_through(self, e: int) -> list[int]:
        bit = 1 << (e - 1)
        return [f for f in self.insep if f & bit]

    def f(self, e: int) -> int:
        return len(self.insep_through(e))

    def classes_in(self, flat: int) -> list[int]:
        return [c for c in self.classes if c & ~flat == 0]

    def p_f(self, flat: int) -> int:
        return len(self.classes_in(flat))

    def p_f_k(self, flat: int) -> Counter:
        return Counter(popcount(c) for c in self.classes_in(flat))

    def visible(self, e: int) -> list[int]:
        """Classes Q (other than e's own) sharing no inseparable flat with e."""
        own = self.class_of(e)
        lines = self.insep_through(e)
        return [q for q in self.classes if q != own and not any(q & ~f == 0 for f in lines)]

    def rank2_flats(self) -> list[int]:
        return self.insep + self.sep


def stats_of(z: CyclicFlatLattice) -> Rank3Stats:
    if z.matroid_rank != 3:
        raise UnsupportedRankError(f"rank-3 statistics need a rank-3 lattice, got rank {z.matroid_rank}")
    if z.bottom.size:
        raise InvalidArgumentsError("insertion states are loopless")
    classes = [f.mask for f in z.flats if f.rank == 1]
    in_class = 0
    for c in classes:
        in_class |= c
    insep, sep = [], []
    for f in z.flats:
        if f.rank == 2:
            pts = sum(1 for c in classes if c & ~f.mask == 0) + popcount(f.mask & ~in_class)
            (insep if pts >= 3 else sep).append(f.mask)
    top = z.top
    return Rank3Stats(z.n, z.n - top.size, classes, insep, sep, top.mask)


def coefficients_from_stats(st: Rank3Stats) -> ExpansionVector:
    """Closed-form Schubert coefficients of a loopless rank-3 matroid, per coloop regime."""
    n = st.n
    c: Counter = Counter()
    if st.coloops == 0:
        flats = st.rank2_flats()
        pairs = [(q, f) for f in flats for q in st.classes if q & ~f == 0]
        c[(1, 2, 3)] += 1 - st.p - len(flats) + len(pairs)
        for q in st.classes:
            k = popcount(q)
            c[(1, k + 1, k + 2)] += 1 - sum(1 for f in flats if q & ~f == 0)
        for f in flats:
            c[(1, 2, popcount(f) + 1)] += 1 - st.p_f(f)
        for q, f in pairs:
            c[(1, popcount(q) + 1, popcount(f) + 1)] += 1
    elif st.coloops == 1:
        # the top is a rank-2 flat on n-1 elements
        c[(1, 2, n)] += 1 - st.p
        for q in st.classes:
            c[(1, popcount(q) + 1, n)] += 1
    elif st.coloops == 2:
        c[(1, n - 1, n)] += 1
    else:
        c[(1, 2, 3)] += 1
    return ExpansionVector.from_xs(3, n, c)


# -- insertion -----------------------------------------------------------------------------


@dataclass(frozen=True)
class InsertionRecord:
    element: int
    case: int
    exceptional: bool
    regime: str  # "cyclic" when [n] is cyclic before the insertion, else "coloops"
    diverged: bool = False


@dataclass
class Rank3State:
    """A loopless rank-3 matroid under construction, with its Schubert coefficients."""

    lattice: CyclicFlatLattice
    coeffs: ExpansionVector
    history: tuple[InsertionRecord, ...] = ()
    descriptor: MatroidDescriptor | None = None

    @property
    def n(self) -> int:
        return self.lattice.n

    @cached_property
    def stats(self) -> Rank3Stats:
        return stats_of(self.lattice)

    @property
    def coloops(self) -> int:
        return self.stats.coloops

    @classmethod
    def from_cover(cls, c: Cover) -> "Rank3State":
        return cls(c.lattice(), simple_coefficients(c))

    def oracle(self) -> ExpansionVector:
        return schubert_expansion_oracle(self.lattice)

    def check(self) -> bool:
        return self.coeffs == self.oracle()

    def key(self) -> tuple:
        return canonical_form(self.lattice)


def insertion_case(st: Rank3Stats, e: int) -> int:
    """1: e is not parallel to anything and on no inseparable flat; 2: not parallel, on
    some inseparable flat; 3: e lies in a contained class; 4: in an uncontained class."""
    cls = st.class_of(e)
    if cls is None:
        return 1 if st.f(e) == 0 else 2
    return 3 if st.contained(cls) else 4


def is_exceptional(st: Rank3Stats) -> bool:
    """No chain of length four in Z(M): no class lies inside a rank-2 cyclic flat."""
    return not any(q & ~f == 0 for f in st.rank2_flats() for q in st.classes)


def inserted_lattice(z: CyclicFlatLattice, e: int) -> CyclicFlatLattice:
    """Z(M_e) where the new element n+1 is parallel to e.

    Cyclic flats through e gain the new element; a cyclic flat Z avoiding e
    yields the new cyclic flat Z + {e, n+1} of rank r(Z)+1 exactly when Z + e is
    a flat of M.
    """
    n = z.n
    bit_e = 1 << (e - 1)
    bit_new = 1 << n
    full = (1 << n) - 1
    out = []
    for f in z.flats:
        if f.mask & bit_e:
            out.append(CyclicFlat.from_mask(f.mask | bit_new, f.rank))
        else:
            out.append(f)
            zm = f.mask | bit_e
            r = rank_from_cyclic_flats(z, zm)
            rest = full & ~zm
            closed = True
            while rest:
                low = rest & -rest
                if rank_from_cyclic_flats(z, zm | low) == r:
                    closed = False
                    break
                rest ^= low
            if closed:
                out.append(CyclicFlat.from_mask(zm | bit_new, f.rank + 1))
    return CyclicFlatLattice(n + 1, tuple(out), z.matroid_rank)


def _move(d: Counter, src: tuple, dst: tuple, value: int) -> None:
    d[src] -= value
    d[dst] += value


def insertion_delta(st: Rank3Stats, e: int) -> Counter:
    """Change of the Schubert coefficients when inserting parallel to e, for [n] cyclic.

    In this regime every label has the form S(1, a, b) and does not depend on n.
    """
    d: Counter = Counter()
    case = insertion_case(st, e)
    size = popcount
    if case in (1, 2):
        lines = st.insep_through(e)
        vis = st.visible(e)
        f, pe = len(lines), len(vis)
        d[(1, 2, 3)] += f + pe - 1
        d[(1, 3, 4)] += 1 - f - pe
        for q in vis:
            # q now lies in one more rank-2 flat, the new separable flat q + {e, e'}
            k = size(q)
            d[(1, k + 1, k + 2)] -= 1
            d[(1, 2, k + 3)] -= 1
            d[(1, 3, k + 3)] += 1
            d[(1, k + 1, k + 3)] += 1
        for line in lines:
            s, pf = size(line), st.p_f(line)
            d[(1, 2, s + 1)] -= 1 - pf
            d[(1, 2, s + 2)] += -pf
            d[(1, 3, s + 2)] += 1
            for q in st.classes_in(line):
                _move(d, (1, size(q) + 1, s + 1), (1, size(q) + 1, s + 2), 1)
        return d
    cls = st.class_of(e)
    m = size(cls)
    around = [fl for fl in st.rank2_flats() if cls & ~fl == 0]
    _move(d, (1, m + 1, m + 2), (1, m + 2, m + 3), 1 - len(around))
    for fl in around:
        s = size(fl)
        _move(d, (1, 2, s + 1), (1, 2, s + 2), 1 - st.p_f(fl))
        _move(d, (1, m + 1, s + 1), (1, m + 2, s + 2), 1)
        for q in st.classes_in(fl):
            if q != cls:
                _move(d, (1, size(q) + 1, s + 1), (1, size(q) + 1, s + 2), 1)
    return d


class DivergenceError(AssertionError):
    pass


def insert_parallel(state: Rank3State, e: int, validate: bool = True, strict: bool = False) -> Rank3State:
    """State of M_e: a new element n+1 parallel to e."""
    n = state.n
    if not 1 <= e <= n:
        raise InvalidArgumentsError(f"element {e} is not in [{n}]")
    if state.lattice.bottom.mask >> (e - 1) & 1:
        raise InvalidArgumentsError("insertion parallel to a loop is not supported")
    st = state.stats
    case = insertion_case(st, e)
    exc = is_exceptional(st)
    z_new = inserted_lattice(state.lattice, e)
    if st.coloops == 0:
        regime = "cyclic"
        d = insertion_delta(st, e)
        merged = Counter(state.coeffs.by_xs())
        merged.update(d)
        coeffs = ExpansionVector.from_xs(3, n + 1, {k: v for k, v in merged.items() if v})
    else:
        regime = "coloops"
        coeffs = coefficients_from_stats(stats_of(z_new))
    diverged = False
    if validate:
        truth = schubert_expansion_oracle(z_new)
        if truth != coeffs:
            diverged = True
            msg = f"closed form diverged from the oracle: case {case} at {e} on {state.lattice}: {coeffs} vs {truth}"
            if strict:
                raise DivergenceError(msg)
            log.warning(msg)
            coeffs = truth
    rec = InsertionRecord(e, case, exc, regime, diverged)
    return Rank3State(z_new, coeffs, state.history + (rec,), None)


# -- enumeration ---------------------------------------------------------------------------


def compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    for bars in combinations(range(1, total), parts - 1):
        edges = (0,) + bars + (total,)
        yield tuple(b - a for a, b in zip(edges, edges[1:]))


def canonical_rank3_descriptor(
    n: int, cover: Cover, multiplicities: Sequence[int], loops: int = 0
) -> MatroidDescriptor:
    cert, relabel = canonical_set_system(cover.n, [(m, 0) for m in cover.masks], list(multiplicities))
    lines = [tuple(sorted(relabel[e - 1] for e in f)) for f in cover.flats]
    mult = [0] * cover.n
    for e in range(cover.n):
        mult[relabel[e] - 1] = multiplicities[e]
    return MatroidDescriptor.rank3(n, lines, cover.n, mult, loops)


def replay(cover: Cover, multiplicities: Sequence[int], validate: bool = True, strict: bool = False) -> Rank3State:
    """Grow the simple matroid of ``cover`` by parallel insertions; coloops are treated last."""
    state = Rank3State.from_cover(cover)
    coloops = set(cover.coloops())
    order = sorted(range(1, cover.n + 1), key=lambda v: (v in coloops, v))
    for v in order:
        for _ in range(multiplicities[v - 1] - 1):
            state = insert_parallel(state, v, validate, strict)
    return state


def descriptor_state(d: MatroidDescriptor, validate: bool = True) -> Rank3State:
    if d.kind != "rank3" or d.loops:
        raise InvalidArgumentsError("states are built from loopless rank-3 descriptors")
    st = replay(Cover(d.points, d.cover), d.multiplicities, validate)
    st.descriptor = d
    return st


def enumerate_rank3_column_states(
    n: int, validate: bool = True, strict: bool = False
) -> list[Rank3State]:
    """All loopless rank-3 matroids on [n] up to isomorphism, grown from their covers."""
    if n < 3:
        raise InvalidArgumentsError(f"rank 3 needs n >= 3, got {n}")
    seen_desc: set = set()
    seen_state: set = set()
    out = []
    for i in range(n, 2, -1):
        for c in cycle_covers(i):
            for mult in compositions(n, i):
                d = canonical_rank3_descriptor(n, c, mult)
                if d in seen_desc:
                    continue
                seen_desc.add(d)
                st = replay(c, mult, validate, strict)
                key = st.key()
                if key in seen_state:
                    continue
                seen_state.add(key)
                st.descriptor = d
                out.append(st)
    return out


# -- the generator matrix ------------------------------------------------------------------


def _shift_loop(d: MatroidDescriptor, n: int) -> MatroidDescriptor:
    if d.kind == "schubert":
        return MatroidDescriptor.schubert(SchubertLabel(tuple(x + 1 for x in d.label.xs), n))
    return MatroidDescriptor.rank3(n, d.cover, d.points, d.multiplicities, d.loops + 1)


def coloop_descriptor(d2: MatroidDescriptor, n: int) -> MatroidDescriptor:
    """Descriptor of (rank-2 class on [n-1]) plus a coloop."""
    if d2.kind == "schubert":
        return MatroidDescriptor.schubert(SchubertLabel(d2.label.xs + (n,), n))
    prof = descriptor_profile(d2)
    pts = prof.p + prof.singletons
    mult = list(prof.parallel_sizes) + [1] * prof.singletons + [1]
    cover = [tuple(range(1, pts + 1))] if pts >= 3 else []
    return MatroidDescriptor.rank3(n, cover, pts + 1, mult, prof.loops)


def coloop_label(xs: tuple[int, int], n: int) -> tuple[int, int, int]:
    """Rank-2 label on [n-1] to the rank-3 label of the matroid with a coloop appended."""
    return xs + (n,)


@dataclass
class O3Build:
    matrix: SparseIntMatrix
    merged: dict[int, list[MatroidDescriptor]] = field(default_factory=dict)
    states: list[Rank3State] = field(default_factory=list)


def _base_o3(n: int) -> SparseIntMatrix:
    from .core import canonical_schubert_order

    m = SparseIntMatrix(3, n)
    for lab in canonical_schubert_order(3, n):
        m.append(ExpansionVector.unit(lab), MatroidDescriptor.schubert(lab))
    return m


@lru_cache(maxsize=None)
def _build_o3(n: int, validate: bool) -> O3Build:
    if n in (3, 4):
        # on at most four elements every rank-3 matroid is Schubert
        return O3Build(_base_o3(n))
    return assemble_o3(n, _build_o3(n - 1, validate).matrix, validate)


def assemble_o3(n: int, prev: SparseIntMatrix, validate: bool = True) -> O3Build:
    """Loopless states, then the loops block from O_{3,n-1}, then the coloops block from O_{2,n-1}."""
    raw: list[tuple[ExpansionVector, MatroidDescriptor]] = []
    states = enumerate_rank3_column_states(n, validate)
    raw += [(st.coeffs, st.descriptor) for st in states]
    for vec, d in prev.columns:
        raw.append((vec.relabel(n, lambda xs: tuple(x + 1 for x in xs)), _shift_loop(d, n)))
    for vec, d in build_o2(n - 1).columns:
        raw.append((vec.relabel(n, lambda xs: coloop_label(xs, n)), coloop_descriptor(d, n)))
    m = SparseIntMatrix(3, n)
    seen: dict[ExpansionVector, int] = {}
    merged: dict[int, list[MatroidDescriptor]] = {}
    for vec, d in raw:
        if vec in seen:
            merged.setdefault(seen[vec], []).append(d)
            continue
        seen[vec] = len(m.columns)
        m.append(vec, d)
    return O3Build(m, merged, states)


def build_o3(n: int, validate: bool = True) -> SparseIntMatrix:
    """O_{3,n}: distinct Schubert expansions of all rank-3 matroids on [n]."""
    if n < 3:
        raise InvalidArgumentsError(f"rank 3 needs n >= 3, got {n}")
    b = _build_o3(n, validate)
    return SparseIntMatrix(3, n, list(b.matrix.columns))


def build_o3_full(n: int, validate: bool = True) -> O3Build:
    return _build_o3(n, validate)


def rank3_descriptor_lattice(d: MatroidDescriptor) -> CyclicFlatLattice:
    return descriptor_to_lattice(d)

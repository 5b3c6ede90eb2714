"""Finite posets, Moebius functions, chain lattices and the cyclic-flat axioms."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable, Iterable, Sequence

from .core import (
    AxiomViolationError,
    CyclicFlat,
    CyclicFlatLattice,
    InvalidArgumentsError,
    NotFoundError,
    from_mask,
    to_mask,
)


def popcount(x: int) -> int:
    return x.bit_count()


# -- posets --------------------------------------------------------------------------------


class FinitePoset:
    """A finite poset given by its elements and a <= predicate.

    The relation is materialised as a boolean matrix and checked for
    reflexivity, antisymmetry and transitivity on construction.
    """

    def __init__(self, elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], check: bool = True):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise InvalidArgumentsError("poset elements must be distinct")
        m = len(self.elements)
        self.le = [[bool(leq(a, b)) for b in self.elements] for a in self.elements]
        if check:
            self._check(m)
        self._memo: dict[tuple[int, int], int] = {}

    def _check(self, m: int) -> None:
        le = self.le
        for i in range(m):
            if not le[i][i]:
                raise InvalidArgumentsError(f"relation not reflexive at {self.elements[i]!r}")
            for j in range(i + 1, m):
                if le[i][j] and le[j][i]:
                    raise InvalidArgumentsError("relation not antisymmetric")
        for i in range(m):
            for j in range(m):
                if le[i][j]:
                    for k in range(m):
                        if le[j][k] and not le[i][k]:
                            raise InvalidArgumentsError("relation not transitive")

    def __len__(self) -> int:
        return len(self.elements)

    def _idx(self, a) -> int:
        try:
            return self.index[a]
        except KeyError:
            raise NotFoundError(f"{a!r} is not an element of the poset") from None

    def leq(self, a, b) -> bool:
        return self.le[self._idx(a)][self._idx(b)]

    def moebius(self, a, b) -> int:
        """mu(a, b) by the recursion mu(a, b) = -sum_{a <= k < b} mu(a, k)."""
        return self._mu(self._idx(a), self._idx(b))

    def _mu(self, i: int, j: int) -> int:
        key = (i, j)
        if key in self._memo:
            return self._memo[key]
        if i == j:
            val = 1
        elif not self.le[i][j]:
            val = 0
        else:
            # iterative over the interval in a linear extension to keep recursion shallow
            interval = [k for k in range(len(self.elements)) if self.le[i][k] and self.le[k][j]]
            interval.sort(key=lambda k: sum(self.le[i2][k] for i2 in interval))
            vals: dict[int, int] = {}
            for k in interval:
                if k == i:
                    vals[k] = 1
                else:
                    vals[k] = -sum(vals[m] for m in interval if m != k and self.le[m][k] and m in vals)
                self._memo[(i, k)] = vals[k]
            val = vals[j]
        self._memo[key] = val
        return val


def moebius(p: FinitePoset, a, b) -> int:
    return p.moebius(a, b)


# -- cyclic flats --------------------------------------------------------------------------


def rank_from_cyclic_flats(z: CyclicFlatLattice, A: Iterable[int] | int) -> int:
    """rk(A) = min over cyclic flats F of r(F) + |A \\ F|."""
    full = (1 << z.n) - 1
    mask = A if isinstance(A, int) else to_mask(A)
    if mask & ~full or mask < 0:
        raise InvalidArgumentsError(f"set is not contained in [{z.n}]")
    return min(f.rank + popcount(mask & ~f.mask) for f in z.flats)


def rank_table(z: CyclicFlatLattice) -> list[int]:
    """rk of every subset of [n], indexed by bitmask."""
    n = z.n
    flats = [(f.mask, f.rank) for f in z.flats]
    out = [0] * (1 << n)
    for mask in range(1 << n):
        out[mask] = min(r + popcount(mask & ~fm) for fm, r in flats)
    return out


@dataclass
class ZReport:
    ok: bool
    axiom: str = ""
    witnesses: tuple = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _meet_join(masks: list[int], a: int, b: int) -> tuple[int | None, int | None]:
    lower = [m for m in masks if m & ~a == 0 and m & ~b == 0]
    upper = [m for m in masks if a & ~m == 0 and b & ~m == 0]
    maxl = [m for m in lower if not any(o != m and m & ~o == 0 for o in lower)]
    minu = [m for m in upper if not any(o != m and o & ~m == 0 for o in upper)]
    return (maxl[0] if len(maxl) == 1 else None), (minu[0] if len(minu) == 1 else None)


def validate_z_axioms(flats: Sequence[CyclicFlat], n: int) -> ZReport:
    """Check Z0 to Z3 on a family of sets with ranks."""
    full = (1 << n) - 1
    masks = [f.mask for f in flats]
    ranks = {f.mask: f.rank for f in flats}
    if len(ranks) != len(flats):
        return ZReport(False, "Z0", tuple(flats), "a set occurs twice")
    if not flats:
        return ZReport(False, "Z0", (), "empty family")
    for f in flats:
        if f.mask & ~full:
            return ZReport(False, "Z0", (f,), f"{f} is not a subset of [{n}]")
    joins: dict[tuple[int, int], tuple[int, int]] = {}
    for a, b in combinations(masks, 2):
        meet, join = _meet_join(masks, a, b)
        if meet is None or join is None:
            return ZReport(
                False, "Z0", (CyclicFlat.from_mask(a, ranks[a]), CyclicFlat.from_mask(b, ranks[b])),
                "pair without a unique meet or join",
            )
        joins[(a, b)] = (meet, join)
    bottom = min(masks, key=popcount)
    if any(bottom & ~m for m in masks):
        return ZReport(False, "Z0", (), "no least element")
    if ranks[bottom] != 0:
        return ZReport(False, "Z1", (CyclicFlat.from_mask(bottom, ranks[bottom]),), "least flat has nonzero rank")
    for a in masks:
        for b in masks:
            if a != b and a & ~b == 0:
                d = ranks[b] - ranks[a]
                if not 0 < d < popcount(b & ~a):
                    return ZReport(
                        False, "Z2", (CyclicFlat.from_mask(a, ranks[a]), CyclicFlat.from_mask(b, ranks[b])),
                        f"r(Y) - r(X) = {d}, |Y - X| = {popcount(b & ~a)}",
                    )
    for (a, b), (meet, join) in joins.items():
        lhs = ranks[join] + ranks[meet] + popcount((a & b) & ~meet)
        if lhs > ranks[a] + ranks[b]:
            return ZReport(
                False, "Z3", (CyclicFlat.from_mask(a, ranks[a]), CyclicFlat.from_mask(b, ranks[b])),
                f"r(X v Y) + r(X ^ Y) + |(X n Y) - (X ^ Y)| = {lhs} > {ranks[a] + ranks[b]}",
            )
    return ZReport(True)


def check_lattice(z: CyclicFlatLattice) -> CyclicFlatLattice:
    rep = validate_z_axioms(z.flats, z.n)
    if not rep:
        raise AxiomViolationError(f"{rep.axiom}: {rep.message} {tuple(str(w) for w in rep.witnesses)}")
    return z


def lattice_from_rank_function(n: int, rk: Callable[[int], int]) -> CyclicFlatLattice:
    """Cyclic flats of the matroid with rank function ``rk`` on bitmasks, by brute force."""
    full = (1 << n) - 1
    ranks = [rk(m) for m in range(1 << n)]
    flats = []
    for m in range(1 << n):
        r = ranks[m]
        closed = all(ranks[m | (1 << i)] > r for i in range(n) if not m >> i & 1)
        if not closed:
            continue
        cyclic = all(ranks[m & ~(1 << i)] == r for i in range(n) if m >> i & 1)
        if cyclic:
            flats.append(CyclicFlat.from_mask(m, r))
    return CyclicFlatLattice(n, tuple(flats), ranks[full])


def lattice_from_bases(n: int, bases: Iterable[Iterable[int]]) -> CyclicFlatLattice:
    basis_masks = [to_mask(b) for b in bases]
    return lattice_from_rank_function(n, lambda m: max(popcount(m & b) for b in basis_masks))


def bases_count(z: CyclicFlatLattice) -> int:
    r = z.matroid_rank
    return sum(1 for c in combinations(range(z.n), r) if rank_from_cyclic_flats(z, sum(1 << i for i in c)) == r)


def permute_lattice(z: CyclicFlatLattice, perm: Sequence[int]) -> CyclicFlatLattice:
    """Relabel element e as perm[e - 1]."""
    return CyclicFlatLattice(
        z.n, tuple(CyclicFlat(tuple(sorted(perm[e - 1] for e in f.elements)), f.rank) for f in z.flats), z.matroid_rank
    )


# -- chain lattice -------------------------------------------------------------------------


@dataclass
class ChainLattice:
    """Chains of Z(M) through its least and greatest element, plus a top 1^.

    ``chains[i]`` is a sorted tuple of indices into ``base.flats``; the top is
    represented by ``None`` in ``poset``.
    """

    base: CyclicFlatLattice
    chains: list[tuple[int, ...]]
    poset: FinitePoset = field(repr=False)

    TOP = None

    def moebius_to_top(self) -> dict[tuple[int, ...], int]:
        return {c: self.poset.moebius(c, None) for c in self.chains}


def intermediate_chains(z: CyclicFlatLattice) -> tuple[int, int, list[tuple[int, ...]]]:
    """Index of bottom and top flat and all chains of the flats strictly between them."""
    flats = z.flats
    bot = flats.index(z.bottom)
    top = flats.index(z.top)
    mids = [i for i in range(len(flats)) if i not in (bot, top)]
    below = {
        i: [j for j in mids if j != i and flats[j].mask & ~flats[i].mask == 0 and flats[j].mask != flats[i].mask]
        for i in mids
    }
    out: list[tuple[int, ...]] = [()]

    def grow(chain: tuple[int, ...]):
        # chain is listed top-down; extend below its last element
        for j in below[chain[-1]]:
            c = chain + (j,)
            out.append(c)
            grow(c)

    for i in mids:
        out.append((i,))
        grow((i,))
    return bot, top, out


def build_chain_lattice(z: CyclicFlatLattice, check: bool = True) -> ChainLattice:
    if check:
        check_lattice(z)
    bot, top, mids = intermediate_chains(z)
    if bot == top:
        chains = [(bot,)]
    else:
        chains = [tuple(sorted((bot, top) + c)) for c in mids]
    sets = {c: frozenset(c) for c in chains}

    def leq(a, b):
        if b is None:
            return True
        if a is None:
            return False
        return sets[a] <= sets[b]

    poset = FinitePoset(chains + [None], leq, check=False)
    return ChainLattice(z, chains, poset)


# -- canonical forms -----------------------------------------------------------------------


def _refine(colors: list, blocks: list[tuple[int, Hashable]], members: list[list[int]]) -> list[int]:
    """Colour refinement on a hypergraph with tagged blocks; returns canonical integer colours."""
    m = len(colors)
    cur = list(colors)
    ncol = len(set(cur))
    while True:
        block_sig = [(tag, tuple(sorted(cur[v] for v in members[bi]))) for bi, (_, tag) in enumerate(blocks)]
        sigs = []
        for v in range(m):
            inc = sorted(block_sig[bi] for bi, (mask, _) in enumerate(blocks) if mask >> v & 1)
            sigs.append((cur[v], tuple(inc)))
        order = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [order[s] for s in sigs]
        k = len(order)
        cur = new
        if k == ncol:
            return cur
        ncol = k


def canonical_set_system(
    n: int, blocks: Sequence[tuple[int, Hashable]], colors: Sequence[Hashable] | None = None
) -> tuple[tuple, list[int]]:
    """Canonical certificate of a set system on [n] with tagged blocks.

    Returns ``(certificate, relabel)`` where ``relabel[e - 1]`` is the new label
    of element e.  Two systems are isomorphic (by a colour-preserving bijection)
    iff their certificates are equal.
    """
    blocks = list(blocks)
    if colors is None:
        colors = [0] * n
    # collapse twins: elements lying in exactly the same blocks with the same colour
    groups: dict[tuple, list[int]] = {}
    for e in range(n):
        key = (colors[e], tuple(bi for bi, (mask, _) in enumerate(blocks) if mask >> e & 1))
        groups.setdefault(key, []).append(e)
    reps = list(groups.values())
    q = len(reps)
    qblocks = []
    for mask, tag in blocks:
        qm = 0
        for gi, g in enumerate(reps):
            if mask >> g[0] & 1:
                qm |= 1 << gi
        qblocks.append((qm, tag))
    members = [[gi for gi in range(q) if qm >> gi & 1] for qm, _ in qblocks]
    qcolors_raw = [(colors[g[0]], len(g)) for g in reps]
    ordering = {c: i for i, c in enumerate(sorted(set(qcolors_raw)))}
    base = _refine([ordering[c] for c in qcolors_raw], qblocks, members)

    best: list = [None, None]

    def certificate(col: list[int]) -> tuple[tuple, list[int]]:
        order = sorted(range(q), key=lambda gi: col[gi])
        relabel = [0] * n
        nxt = 1
        for gi in order:
            for e in reps[gi]:
                relabel[e] = nxt
                nxt += 1
        cert = tuple(
            sorted((tuple(sorted(relabel[e] for e in range(n) if mask >> e & 1)), tag) for mask, tag in blocks)
        )
        cert = (n, tuple(colors[e] for e in sorted(range(n), key=lambda e: relabel[e])), cert)
        return cert, relabel

    def search(col: list[int]) -> None:
        cells: dict[int, list[int]] = {}
        for gi, c in enumerate(col):
            cells.setdefault(c, []).append(gi)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            cert, relabel = certificate(col)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, relabel
            return
        for v in target:
            nc = [2 * c + (0 if gi == v or col[gi] != col[v] else 1) for gi, c in enumerate(col)]
            search(_refine(nc, qblocks, members))

    search(base)
    return best[0], best[1]


def canonical_form(z: CyclicFlatLattice) -> tuple:
    cert, _ = canonical_set_system(z.n, [(f.mask, f.rank) for f in z.flats])
    return cert


def canonical_lattice(z: CyclicFlatLattice) -> CyclicFlatLattice:
    _, relabel = canonical_set_system(z.n, [(f.mask, f.rank) for f in z.flats])
    return permute_lattice(z, relabel)

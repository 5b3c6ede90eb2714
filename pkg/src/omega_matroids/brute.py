"""Brute-force enumeration of rank-3 cyclic-flat lattices on [n].

Independent of covers and insertion: candidate families of sets with ranks
are generated directly, filtered by the Z0-Z3 axioms and reduced up to
isomorphism.  Only cheap necessary conditions prune the search; the final
word is always ``validate_z_axioms``.
"""

from __future__ import annotations

from itertools import combinations

from .core import CyclicFlat, CyclicFlatLattice, InvalidArgumentsError
from .lattice import canonical_form, popcount, validate_z_axioms


def _subsets(pool: list[int], lo: int, hi: int) -> list[int]:
    out = []
    for k in range(lo, hi + 1):
        for c in combinations(pool, k):
            m = 0
            for b in c:
                m |= b
            out.append(m)
    return out


def _families(l: int, t: int, r_top: int):
    """Families (loops, rank-1 flats, rank-2 flats, top) with loops [l] and top [t]."""
    L = (1 << l) - 1
    T = (1 << t) - 1
    free = [1 << i for i in range(l, t)]
    if r_top == 0:
        if t == l:
            yield [(L, 0)]
        return
    if r_top == 1:
        if t - l >= 2:
            yield [(L, 0), (T, 1)]
        return
    # rank-1 candidates P (outside L): |P| >= 2 and |T - P| > r_top - 1
    ones = [m for m in _subsets(free, 2, len(free)) if popcount(T & ~(L | m)) > r_top - 1]
    twos = []
    if r_top == 3:
        twos = [m for m in _subsets(free, 3, len(free)) if popcount(T & ~(L | m)) > 1]

    def pick_ones(start, chosen, used):
        yield list(chosen)
        for j in range(start, len(ones)):
            m = ones[j]
            if m & used:
                continue
            chosen.append(m)
            yield from pick_ones(j + 1, chosen, used | m)
            chosen.pop()

    for ps in pick_ones(0, [], 0):
        if r_top == 2:
            if t - l >= 3:
                yield [(L, 0)] + [(L | p, 1) for p in ps] + [(T, 2)]
            continue
        # rank-2 flats must be compatible with the chosen classes and with each other
        ok_twos = []
        for x in twos:
            good = True
            for p in ps:
                inside = p & ~x == 0
                if not inside and p & x:
                    good = False
                    break
                if inside and popcount(x & ~p) < 2:
                    good = False
                    break
            if good:
                ok_twos.append(x)

        def compatible(x, y):
            inter = x & y
            if popcount(inter) <= 1:
                return True
            return inter in ps

        def pick_twos(start, chosen):
            yield list(chosen)
            for j in range(start, len(ok_twos)):
                x = ok_twos[j]
                if all(compatible(x, y) for y in chosen):
                    chosen.append(x)
                    yield from pick_twos(j + 1, chosen)
                    chosen.pop()

        for xs in pick_twos(0, []):
            yield [(L, 0)] + [(L | p, 1) for p in ps] + [(L | x, 2) for x in xs] + [(T, 3)]


def enumerate_lattices_bruteforce(n: int, r: int = 3) -> list[CyclicFlatLattice]:
    """All rank-r cyclic-flat lattices on [n] up to isomorphism (r <= 3)."""
    if r != 3:
        raise InvalidArgumentsError("the brute-force enumerator is written for rank 3")
    found: dict[tuple, CyclicFlatLattice] = {}
    rejected: set = set()
    for l in range(0, n + 1):
        for t in range(l, n + 1):
            coloops = n - t
            r_top = r - coloops
            if r_top < 0:
                continue
            for fam in _families(l, t, r_top):
                flats = tuple(CyclicFlat.from_mask(m, rk) for m, rk in fam)
                try:
                    z = CyclicFlatLattice(n, flats)
                except InvalidArgumentsError:
                    continue
                if z.matroid_rank != r:
                    continue
                key = canonical_form(z)
                if key in found or key in rejected:
                    continue
                if validate_z_axioms(z.flats, n):
                    found[key] = z
                else:
                    rejected.add(key)
    return list(found.values())

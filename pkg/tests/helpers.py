"""Shared fixtures data for the test suite (kept out of conftest so tests can import it)."""

from functools import lru_cache
from itertools import combinations

from omega_matroids.brute import enumerate_lattices_bruteforce
from omega_matroids.core import CyclicFlatLattice, SchubertLabel, rank2_lattice
from omega_matroids.rank2 import enumerate_profiles


@lru_cache(maxsize=None)
def rank3_lattices(n):
    return tuple(enumerate_lattices_bruteforce(n, 3))


@lru_cache(maxsize=None)
def rank2_lattices(n):
    return tuple(p.lattice() for p in enumerate_profiles(n))


def all_labels(r, n):
    return [SchubertLabel(c, n) for c in combinations(range(1, n + 1), r)]


def u12_u12() -> CyclicFlatLattice:
    return rank2_lattice(4, 0, (2, 2))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

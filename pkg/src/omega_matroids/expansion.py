"""Schubert expansions from Moebius values on the chain lattice, and their
verification through symmetrized indicator functions of base polytopes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import lcm
from typing import Sequence

import numpy as np

from .core import (
    CyclicFlatLattice,
    ExpansionVector,
    InvalidChainError,
    SchubertLabel,
    UnsupportedRankError,
    UnsupportedSizeError,
    canonical_schubert_order,
    schubert_lattice,
)
from .lattice import build_chain_lattice, intermediate_chains, rank_table

SUPPORTED_RANKS = (2, 3)


def chain_to_schubert_label(chain: Sequence[tuple[int, int]], n: int) -> SchubertLabel:
    """Label of the Schubert matroid whose cyclic flats have these (size, rank) pairs.

    Each step from (s, r) to (s', r') contributes s+1, ..., s+(r'-r) to the label;
    the elements after the top flat are coloops and contribute themselves.
    """
    chain = list(chain)
    if not chain:
        raise InvalidChainError("empty chain")
    if chain[0][1] != 0:
        raise InvalidChainError(f"chain must start at rank 0, got {chain[0]}")
    for (s0, r0), (s1, r1) in zip(chain, chain[1:]):
        if not (s1 > s0 and 0 < r1 - r0 < s1 - s0):
            raise InvalidChainError(f"step {(s0, r0)} -> {(s1, r1)} violates the cyclic-flat axioms")
    s_top = chain[-1][0]
    if s_top > n or chain[0][0] < 0:
        raise InvalidChainError(f"chain does not fit into [{n}]")
    xs: list[int] = []
    for (s0, r0), (_, r1) in zip(chain, chain[1:]):
        xs.extend(range(s0 + 1, s0 + 1 + r1 - r0))
    xs.extend(range(s_top + 1, n + 1))
    if not xs:
        raise InvalidChainError("chain describes a rank-0 matroid")
    return SchubertLabel(tuple(xs), n)


@lru_cache(maxsize=None)
def signature_table(r: int, n: int) -> dict[tuple[tuple[int, int], ...], SchubertLabel]:
    """(size, rank) chain signature -> label, read off the lattice of every label."""
    table = {}
    for lab in canonical_schubert_order(r, n):
        z = schubert_lattice(lab)
        sig = tuple((f.size, f.rank) for f in z.flats)
        if sig in table:
            raise AssertionError(f"two labels share the signature {sig}")
        table[sig] = lab
    return table


def _mu_to_top(le: list[list[bool]]) -> list[int]:
    """mu(x, top) for every x of a poset whose last element is the top, via the dual recursion."""
    m = len(le)
    order = sorted(range(m), key=lambda k: sum(le[k]))  # top first: fewest elements above
    mu = [0] * m
    done = []
    for k in order:
        if k == m - 1:
            mu[k] = 1
        else:
            mu[k] = -sum(mu[j] for j in done if le[k][j])
        done.append(k)
    return mu


def chain_coefficients(z: CyclicFlatLattice) -> list[tuple[tuple[int, ...], SchubertLabel, int]]:
    """(chain, label, -mu(chain, 1^)) for every chain of Z(M) through its bottom and top."""
    flats = z.flats
    bot, top, mids = intermediate_chains(z)
    if bot == top:
        chains = [(bot,)]
    else:
        chains = [tuple(sorted((bot, top) + c, key=lambda i: flats[i].size)) for c in mids]
    sets = [frozenset(c) for c in chains]
    m = len(chains) + 1
    le = [[False] * m for _ in range(m)]
    for i in range(len(chains)):
        le[i][m - 1] = True
        for j in range(len(chains)):
            le[i][j] = sets[i] <= sets[j]
    le[m - 1][m - 1] = True
    mu = _mu_to_top(le)
    out = []
    for i, c in enumerate(chains):
        lab = chain_to_schubert_label([(flats[k].size, flats[k].rank) for k in c], z.n)
        out.append((c, lab, -mu[i]))
    return out


def schubert_expansion_oracle(z: CyclicFlatLattice, check: bool = False) -> ExpansionVector:
    """Schubert coefficients lambda_S = sum of -mu(C, 1^) over chains C of type S."""
    if z.matroid_rank not in SUPPORTED_RANKS:
        raise UnsupportedRankError(f"oracle supports ranks {SUPPORTED_RANKS}, got {z.matroid_rank}")
    if check:
        build_chain_lattice(z, check=True)
    coeffs: dict[SchubertLabel, int] = {}
    for _, lab, c in chain_coefficients(z):
        coeffs[lab] = coeffs.get(lab, 0) + c
    return ExpansionVector.from_mapping(z.matroid_rank, z.n, coeffs)


def oracle_via_poset(z: CyclicFlatLattice) -> ExpansionVector:
    """Slow twin of the oracle that goes through FinitePoset.moebius."""
    cl = build_chain_lattice(z)
    coeffs: dict[SchubertLabel, int] = {}
    for c, mu in cl.moebius_to_top().items():
        lab = chain_to_schubert_label([(z.flats[k].size, z.flats[k].rank) for k in c], z.n)
        coeffs[lab] = coeffs.get(lab, 0) - mu
    return ExpansionVector.from_mapping(z.matroid_rank, z.n, coeffs)


# -- indicator functions -------------------------------------------------------------------

MAX_INDICATOR_N = 7


@dataclass(frozen=True)
class IndicatorSample:
    point: tuple[Fraction, ...]
    orbit_weight: Fraction = Fraction(1)


@dataclass
class IndicatorResult:
    ok: bool
    samples: int
    counterexample: IndicatorSample | None = None
    lhs: int = 0
    rhs: int = 0

    def __bool__(self) -> bool:
        return self.ok


@lru_cache(maxsize=16)
def _perm_matrix(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.int64)


@lru_cache(maxsize=16)
def _subset_matrix(n: int) -> np.ndarray:
    return np.array([[(m >> i) & 1 for i in range(n)] for m in range(1 << n)], dtype=np.int64)


@lru_cache(maxsize=4096)
def _schubert_rank_table(label: SchubertLabel) -> np.ndarray:
    return np.array(rank_table(schubert_lattice(label)), dtype=np.int64)


def symmetrized_count(ranks: np.ndarray, r: int, point: Sequence[Fraction]) -> int:
    """Number of permutations sigma with sigma(x) in the base polytope of the rank table."""
    n = len(point)
    den = lcm(*(f.denominator for f in point))
    ints = np.array([int(f * den) for f in point], dtype=np.int64)
    if ints.sum() != r * den:
        return 0
    permuted = ints[_perm_matrix(n)]  # (n!, n)
    sums = permuted @ _subset_matrix(n).T  # (n!, 2^n)
    return int(np.all(sums <= ranks[None, :] * den, axis=1).sum())


def random_points(n: int, r: int, count: int, seed: int) -> list[tuple[Fraction, ...]]:
    """Rational points of [0,1]^n with coordinate sum r and denominators <= 100."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        den = int(rng.integers(2, 101))
        a = [0] * n
        left = r * den
        while left:
            free = [i for i in range(n) if a[i] < den]
            i = free[int(rng.integers(len(free)))]
            step = int(rng.integers(1, min(left, den - a[i]) + 1))
            a[i] += step
            left -= step
        out.append(tuple(Fraction(v, den) for v in a))
    return out


def zero_one_points(n: int, r: int) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(int(i in c)) for i in range(n)) for c in combinations(range(n), r)]


def verify_expansion_indicator(
    z: CyclicFlatLattice, ev: ExpansionVector, samples: int = 50, seed: int = 0
) -> IndicatorResult:
    """Compare both sides of the symmetrized indicator identity at sample points."""
    n, r = z.n, z.matroid_rank
    if n > MAX_INDICATOR_N:
        raise UnsupportedSizeError(f"indicator verification enumerates S_n; n <= {MAX_INDICATOR_N} required")
    if ev.r != r or ev.n != n:
        return IndicatorResult(False, 0)
    ranks_m = np.array(rank_table(z), dtype=np.int64)
    pts = zero_one_points(n, r) + random_points(n, r, samples, seed)
    for k, x in enumerate(pts):
        lhs = symmetrized_count(ranks_m, r, x)
        rhs = sum(c * symmetrized_count(_schubert_rank_table(lab), r, x) for lab, c in ev.items)
        if lhs != rhs:
            return IndicatorResult(False, k + 1, IndicatorSample(x), lhs, rhs)
    return IndicatorResult(True, len(pts))


def basis_count_from_ranks(z: CyclicFlatLattice) -> int:
    r = z.matroid_rank
    ranks = rank_table(z)
    return sum(1 for c in combinations(range(z.n), r) if ranks[sum(1 << i for i in c)] == r)


def schubert_basis_count(label: SchubertLabel) -> int:
    """Number of r-sets b_1 < ... < b_r with b_i >= x_i."""
    return sum(1 for c in combinations(range(1, label.n + 1), label.r) if all(b >= x for b, x in zip(c, label.xs)))

"""Shared domain types: ground sets, cyclic flats, Schubert labels, expansion
vectors, sparse matrices and matroid descriptors.

Ground sets are always ``[n] = {1, ..., n}``.  Every type here is immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence


class InvalidArgumentsError(ValueError):
    pass


class InvalidDescriptorError(ValueError):
    pass


class AxiomViolationError(ValueError):
    pass


class UnsupportedRankError(ValueError):
    pass


class UnsupportedSizeError(ValueError):
    pass


class InvalidChainError(ValueError):
    pass


class NotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class GroundSet:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentsError(f"ground set size must be positive, got {self.n}")

    def __iter__(self) -> Iterator[int]:
        return iter(range(1, self.n + 1))

    def __len__(self) -> int:
        return self.n


def to_mask(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def from_mask(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class CyclicFlat:
    """A cyclic flat given by its elements and its rank."""

    elements: tuple[int, ...]
    rank: int
    mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        els = tuple(sorted(set(self.elements)))
        if len(els) != len(self.elements) or els != tuple(self.elements):
            els_in = tuple(self.elements)
            if len(set(els_in)) != len(els_in):
                raise InvalidArgumentsError(f"duplicate elements in flat {els_in}")
            object.__setattr__(self, "elements", els)
        if self.rank < 0 or self.rank > len(self.elements):
            raise InvalidArgumentsError(f"rank {self.rank} impossible for flat of size {len(self.elements)}")
        object.__setattr__(self, "mask", to_mask(self.elements))

    @classmethod
    def from_mask(cls, mask: int, rank: int) -> "CyclicFlat":
        return cls(from_mask(mask), rank)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __contains__(self, e: int) -> bool:
        return bool(self.mask >> (e - 1) & 1)

    def __str__(self) -> str:
        body = "".join(map(str, self.elements)) if all(e < 10 for e in self.elements) else ",".join(map(str, self.elements))
        return f"{{{body}}}(r{self.rank})"


@dataclass(frozen=True)
class CyclicFlatLattice:
    """A matroid presented by its cyclic flats and their ranks.

    The flats are stored sorted by (rank, size, elements).  The matroid rank is
    derived from the maximal flat ``C`` as ``r(C) + n - |C|``; passing
    ``matroid_rank`` explicitly checks it against that value.
    """

    n: int
    flats: tuple[CyclicFlat, ...]
    matroid_rank: int = -1

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentsError(f"ground set size must be positive, got {self.n}")
        flats = tuple(sorted(set(self.flats), key=lambda f: (f.rank, f.size, f.elements)))
        if not flats:
            raise InvalidArgumentsError("a lattice of cyclic flats is never empty")
        full = (1 << self.n) - 1
        for f in flats:
            if f.mask & ~full:
                raise InvalidArgumentsError(f"flat {f} is not a subset of [{self.n}]")
        object.__setattr__(self, "flats", flats)
        top = max(flats, key=lambda f: (f.size, f.rank))
        derived = top.rank + self.n - top.size
        if self.matroid_rank == -1:
            object.__setattr__(self, "matroid_rank", derived)
        elif self.matroid_rank != derived:
            raise InvalidArgumentsError(
                f"matroid rank {self.matroid_rank} disagrees with r(C) + n - |C| = {derived}"
            )

    @classmethod
    def from_sets(cls, n: int, pairs: Iterable[tuple[Iterable[int], int]], matroid_rank: int = -1) -> "CyclicFlatLattice":
        return cls(n, tuple(CyclicFlat(tuple(sorted(s)), r) for s, r in pairs), matroid_rank)

    @property
    def ground(self) -> GroundSet:
        return GroundSet(self.n)

    @property
    def bottom(self) -> CyclicFlat:
        return self.flats[0]

    @property
    def top(self) -> CyclicFlat:
        return max(self.flats, key=lambda f: (f.size, f.rank))

    @property
    def loops(self) -> tuple[int, ...]:
        return self.bottom.elements

    @property
    def coloops(self) -> tuple[int, ...]:
        return from_mask(((1 << self.n) - 1) & ~self.top.mask)

    def key(self) -> tuple:
        return (self.n, tuple((f.elements, f.rank) for f in self.flats))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rank": self.matroid_rank,
            "cyclic_flats": [{"set": list(f.elements), "rank": f.rank} for f in self.flats],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CyclicFlatLattice":
        try:
            n = int(data["n"])
            flats = [(entry["set"], int(entry["rank"])) for entry in data["cyclic_flats"]]
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentsError(f"malformed matroid JSON: {exc}") from exc
        return cls.from_sets(n, flats, int(data.get("rank", -1)))

    def __str__(self) -> str:
        return " ".join(str(f) for f in self.flats) + f" on [{self.n}], rank {self.matroid_rank}"


@dataclass(frozen=True, order=True)
class SchubertLabel:
    """The Schubert matroid S(x_1, ..., x_r) on [n].

    Its bases are the r-sets {b_1 < ... < b_r} with b_i >= x_i, so S(1, ..., r)
    is uniform and S(n-r+1, ..., n) has a single basis.
    """

    xs: tuple[int, ...]
    n: int

    def __post_init__(self):
        xs = tuple(self.xs)
        object.__setattr__(self, "xs", xs)
        if not xs:
            raise InvalidArgumentsError("a Schubert label needs at least one entry")
        if xs[0] < 1 or xs[-1] > self.n or any(a >= b for a, b in zip(xs, xs[1:])):
            raise InvalidArgumentsError(f"invalid Schubert label {xs} on [{self.n}]")

    @property
    def r(self) -> int:
        return len(self.xs)

    def __str__(self) -> str:
        return "S(" + ",".join(map(str, self.xs)) + ")"

    @classmethod
    def parse(cls, text: str, n: int) -> "SchubertLabel":
        text = text.strip()
        if not (text.startswith("S(") and text.endswith(")")):
            raise InvalidArgumentsError(f"cannot parse Schubert label {text!r}")
        return cls(tuple(int(t) for t in text[2:-1].split(",")), n)


def canonical_schubert_order(r: int, n: int) -> list[SchubertLabel]:
    """All rank-r Schubert labels on [n] in descending lexicographic order."""
    if r < 1 or n < 1 or r > n:
        raise InvalidArgumentsError(f"need 1 <= r <= n, got r={r}, n={n}")
    return [SchubertLabel(xs, n) for xs in sorted(combinations(range(1, n + 1), r), reverse=True)]


_ORDER_CACHE: dict[tuple[int, int], dict[SchubertLabel, int]] = {}


def row_index(r: int, n: int) -> dict[SchubertLabel, int]:
    key = (r, n)
    if key not in _ORDER_CACHE:
        _ORDER_CACHE[key] = {lab: i for i, lab in enumerate(canonical_schubert_order(r, n))}
    return _ORDER_CACHE[key]


@dataclass(frozen=True)
class ExpansionVector:
    """Integer Schubert coefficients of one matroid; zero entries are dropped."""

    r: int
    n: int
    items: tuple[tuple[SchubertLabel, int], ...]

    def __post_init__(self):
        order = row_index(self.r, self.n)
        merged: dict[SchubertLabel, int] = {}
        for lab, c in self.items:
            if lab.r != self.r or lab.n != self.n:
                raise InvalidArgumentsError(f"label {lab} on [{lab.n}] does not live in rank {self.r} on [{self.n}]")
            merged[lab] = merged.get(lab, 0) + int(c)
        items = tuple(sorted(((k, v) for k, v in merged.items() if v), key=lambda kv: order[kv[0]]))
        object.__setattr__(self, "items", items)

    @classmethod
    def from_mapping(cls, r: int, n: int, coeffs: Mapping[SchubertLabel, int]) -> "ExpansionVector":
        return cls(r, n, tuple(coeffs.items()))

    @classmethod
    def from_xs(cls, r: int, n: int, coeffs: Mapping[tuple[int, ...], int]) -> "ExpansionVector":
        return cls(r, n, tuple((SchubertLabel(xs, n), c) for xs, c in coeffs.items()))

    @classmethod
    def unit(cls, label: SchubertLabel) -> "ExpansionVector":
        return cls(label.r, label.n, ((label, 1),))

    @property
    def coeffs(self) -> dict[SchubertLabel, int]:
        return dict(self.items)

    def by_xs(self) -> dict[tuple[int, ...], int]:
        return {lab.xs: c for lab, c in self.items}

    def __getitem__(self, label: SchubertLabel | tuple[int, ...]) -> int:
        xs = label.xs if isinstance(label, SchubertLabel) else tuple(label)
        for lab, c in self.items:
            if lab.xs == xs:
                return c
        return 0

    def dense(self) -> list[int]:
        order = row_index(self.r, self.n)
        out = [0] * len(order)
        for lab, c in self.items:
            out[order[lab]] = c
        return out

    def relabel(self, n: int, fn) -> "ExpansionVector":
        """Map every label's tuple through ``fn`` into rank-``len(fn(xs))`` labels on [n]."""
        items = tuple((SchubertLabel(fn(lab.xs), n), c) for lab, c in self.items)
        r = items[0][0].r if items else self.r
        return ExpansionVector(r, n, items)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{lab}: {c}" for lab, c in self.items) + "}"


# -- descriptors ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatroidDescriptor:
    """Provenance record naming the isomorphism class behind a matrix column.

    kinds:
      ``schubert``  label
      ``rank2``     loops, parallel_sizes (sizes >= 2; the remaining elements are
                    non-parallel points)
      ``rank3``     cover (lines of a simple rank-3 matroid on [i]),
                    multiplicities (one per point of [i]), loops
    """

    kind: str
    n: int
    label: SchubertLabel | None = None
    loops: int = 0
    parallel_sizes: tuple[int, ...] = ()
    cover: tuple[tuple[int, ...], ...] = ()
    points: int = 0
    multiplicities: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == "schubert":
            if self.label is None or self.label.n != self.n:
                raise InvalidDescriptorError("schubert descriptor needs a label on the same ground set")
        elif self.kind == "rank2":
            sizes = tuple(sorted(self.parallel_sizes, reverse=True))
            object.__setattr__(self, "parallel_sizes", sizes)
            if any(s < 2 for s in sizes):
                raise InvalidDescriptorError(f"parallel classes must have size >= 2, got {sizes}")
            singles = self.n - self.loops - sum(sizes)
            if self.loops < 0 or singles < 0:
                raise InvalidDescriptorError(f"profile does not fit into [{self.n}]")
            if len(sizes) + singles < 2:
                raise InvalidDescriptorError("profile has rank below 2")
        elif self.kind == "rank3":
            cover = tuple(sorted(tuple(sorted(line)) for line in self.cover))
            object.__setattr__(self, "cover", cover)
            if len(self.multiplicities) != self.points or any(m < 1 for m in self.multiplicities):
                raise InvalidDescriptorError("one multiplicity >= 1 per cover point is required")
            if self.loops + sum(self.multiplicities) != self.n:
                raise InvalidDescriptorError("loops and multiplicities must add up to n")
            if self.points < 3:
                raise InvalidDescriptorError("a rank-3 simple matroid needs at least 3 points")
            for line in cover:
                if len(line) < 3 or len(line) > self.points - 1 or line[0] < 1 or line[-1] > self.points:
                    raise InvalidDescriptorError(f"bad line {line} in cover on [{self.points}]")
            for a, b in combinations(cover, 2):
                if len(set(a) & set(b)) > 1:
                    raise InvalidDescriptorError(f"lines {a} and {b} share two points")
        else:
            raise InvalidDescriptorError(f"unknown descriptor kind {self.kind!r}")

    @property
    def rank(self) -> int:
        return {"schubert": self.label.r if self.label else 0, "rank2": 2, "rank3": 3}[self.kind]

    @property
    def singletons(self) -> int:
        """Non-loop elements outside every parallel class (rank-2 descriptors)."""
        return self.n - self.loops - sum(self.parallel_sizes)

    @property
    def coloops(self) -> int:
        if self.kind == "rank3":
            # a point is a coloop of the simple matroid iff the other points form a line
            count = 0
            for v in range(1, self.points + 1):
                rest = set(range(1, self.points + 1)) - {v}
                if self.multiplicities[v - 1] == 1 and (
                    len(rest) == 2 or any(set(line) == rest for line in self.cover)
                ):
                    count += 1
            return count
        if self.kind == "rank2":
            p, s = len(self.parallel_sizes), self.singletons
            return s if p + s == 2 else 0
        lab = self.label
        run = 0
        for x in reversed(lab.xs):
            if x == self.n - run:
                run += 1
            else:
                break
        return run

    @classmethod
    def schubert(cls, label: SchubertLabel) -> "MatroidDescriptor":
        return cls("schubert", label.n, label=label)

    @classmethod
    def rank2(cls, n: int, loops: int, parallel_sizes: Iterable[int]) -> "MatroidDescriptor":
        return cls("rank2", n, loops=loops, parallel_sizes=tuple(parallel_sizes))

    @classmethod
    def rank3(cls, n: int, cover: Iterable[Iterable[int]], points: int, multiplicities: Sequence[int], loops: int = 0):
        return cls(
            "rank3", n, loops=loops, cover=tuple(tuple(c) for c in cover), points=points,
            multiplicities=tuple(multiplicities),
        )

    def to_json(self) -> dict:
        if self.kind == "schubert":
            return {"kind": "schubert", "n": self.n, "label": list(self.label.xs)}
        if self.kind == "rank2":
            return {"kind": "rank2", "n": self.n, "loops": self.loops, "parallel_sizes": list(self.parallel_sizes)}
        return {
            "kind": "rank3", "n": self.n, "loops": self.loops, "points": self.points,
            "cover": [list(c) for c in self.cover], "multiplicities": list(self.multiplicities),
            "coloops": self.coloops,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MatroidDescriptor":
        kind = data.get("kind")
        n = int(data["n"])
        if kind == "schubert":
            return cls.schubert(SchubertLabel(tuple(data["label"]), n))
        if kind == "rank2":
            return cls.rank2(n, int(data["loops"]), data["parallel_sizes"])
        if kind == "rank3":
            return cls.rank3(n, data["cover"], int(data["points"]), data["multiplicities"], int(data["loops"]))
        raise InvalidDescriptorError(f"unknown descriptor kind {kind!r}")

    def __str__(self) -> str:
        if self.kind == "schubert":
            return f"{self.label}"
        if self.kind == "rank2":
            return f"rank2(n={self.n}, loops={self.loops}, classes={list(self.parallel_sizes)})"
        return (
            f"rank3(n={self.n}, loops={self.loops}, cover={[list(c) for c in self.cover]} on [{self.points}], "
            f"mult={list(self.multiplicities)})"
        )


# -- sparse matrices -----------------------------------------------------------------------


@dataclass
class SparseIntMatrix:
    """Columns of Schubert coefficients with their descriptors.

    Rows are the rank-r labels on [n] in ``canonical_schubert_order``.
    """

    r: int
    n: int
    columns: list[tuple[ExpansionVector, MatroidDescriptor]] = field(default_factory=list)

    @property
    def row_labels(self) -> list[SchubertLabel]:
        return canonical_schubert_order(self.r, self.n)

    @property
    def shape(self) -> tuple[int, int]:
        return comb(self.n, self.r), len(self.columns)

    def append(self, vec: ExpansionVector, desc: MatroidDescriptor) -> None:
        if vec.r != self.r or vec.n != self.n:
            raise InvalidArgumentsError(f"column lives in rank {vec.r} on [{vec.n}], matrix is {self.r}, [{self.n}]")
        self.columns.append((vec, desc))

    def vectors(self) -> list[ExpansionVector]:
        return [v for v, _ in self.columns]

    def descriptors(self) -> list[MatroidDescriptor]:
        return [d for _, d in self.columns]

    def triples(self) -> Iterator[tuple[int, int, int]]:
        """(row, column, value), 0-indexed, column-major."""
        order = row_index(self.r, self.n)
        for j, (vec, _) in enumerate(self.columns):
            for i, v in sorted((order[lab], v) for lab, v in vec.items):
                yield i, j, v

    def nnz(self) -> int:
        return sum(len(v.items) for v, _ in self.columns)

    def dense(self) -> list[list[int]]:
        rows, cols = self.shape
        out = [[0] * cols for _ in range(rows)]
        for i, j, v in self.triples():
            out[i][j] = v
        return out

    def dense_columns(self) -> list[tuple[int, ...]]:
        return [tuple(v.dense()) for v, _ in self.columns]

    def sorted_columns(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.r, self.n, sorted(self.columns, key=lambda c: c[0].dense(), reverse=True))

    def to_triples_text(self) -> str:
        rows, cols = self.shape
        lines = [f"{rows} {cols} {self.nnz()}"]
        lines += [f"{i + 1} {j + 1} {v}" for i, j, v in self.triples()]
        return "\n".join(lines) + "\n"

    def sidecar(self) -> dict:
        return {
            "rank": self.r,
            "n": self.n,
            "row_labels": [str(lab) for lab in self.row_labels],
            "columns": [d.to_json() for d in self.descriptors()],
        }

    def to_json(self) -> dict:
        rows, cols = self.shape
        return {
            **self.sidecar(),
            "shape": [rows, cols],
            "triples": [[i + 1, j + 1, v] for i, j, v in self.triples()],
        }

    @classmethod
    def from_triples_text(cls, text: str, sidecar: Mapping) -> "SparseIntMatrix":
        r, n = int(sidecar["rank"]), int(sidecar["n"])
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols, nnz = map(int, lines[0].split())
        labels = canonical_schubert_order(r, n)
        if rows != len(labels) or cols != len(sidecar["columns"]) or nnz != len(lines) - 1:
            raise InvalidArgumentsError("triple header disagrees with sidecar")
        data: list[dict[SchubertLabel, int]] = [{} for _ in range(cols)]
        for ln in lines[1:]:
            i, j, v = map(int, ln.split())
            data[j - 1][labels[i - 1]] = v
        descs = [MatroidDescriptor.from_json(d) for d in sidecar["columns"]]
        return cls(r, n, [(ExpansionVector.from_mapping(r, n, d), desc) for d, desc in zip(data, descs)])


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)


# -- representatives -----------------------------------------------------------------------


def schubert_cyclic_flats(label: SchubertLabel) -> list[tuple[int, int]]:
    """(k, rank) for the cyclic flats [k] of S(x); they form a chain of initial segments."""
    xs, n = set(label.xs), label.n
    out = []
    for k in range(0, n + 1):
        if k not in xs and (k == n or k + 1 in xs):
            out.append((k, sum(1 for x in label.xs if x <= k)))
    return out


def schubert_lattice(label: SchubertLabel) -> CyclicFlatLattice:
    return CyclicFlatLattice.from_sets(
        label.n, [(range(1, k + 1), r) for k, r in schubert_cyclic_flats(label)], label.r
    )


def rank2_lattice(n: int, loops: int, parallel_sizes: Sequence[int]) -> CyclicFlatLattice:
    """Loops [1..l], then the parallel classes in decreasing size, then the non-parallel points."""
    sizes = sorted(parallel_sizes, reverse=True)
    singles = n - loops - sum(sizes)
    L = list(range(1, loops + 1))
    flats = [(L, 0)]
    start = loops + 1
    for s in sizes:
        flats.append((L + list(range(start, start + s)), 1))
        start += s
    if not (singles >= 1 and len(sizes) + singles == 2):
        flats.append((range(1, n + 1), 2))
    return CyclicFlatLattice.from_sets(n, flats, 2)


def rank3_rank_function(d: "MatroidDescriptor"):
    """rk on bitmasks of [n] for a rank-3 descriptor.

    Loops are [1..l]; point v of the simple matroid owns the next
    multiplicities[v - 1] elements.
    """
    owner: list[int] = []  # bit index -> point (0 for loops)
    owner += [0] * d.loops
    for v, m in enumerate(d.multiplicities, start=1):
        owner += [v] * m
    lines = [to_mask(line) for line in d.cover]

    def rk(mask: int) -> int:
        pts = 0
        i = 0
        while mask:
            if mask & 1 and owner[i]:
                pts |= 1 << (owner[i] - 1)
            mask >>= 1
            i += 1
        c = pts.bit_count()
        if c <= 2:
            return c
        return 2 if any(pts & ~ln == 0 for ln in lines) else 3

    return rk


def descriptor_to_lattice(d: MatroidDescriptor) -> CyclicFlatLattice:
    if d.kind == "schubert":
        return schubert_lattice(d.label)
    if d.kind == "rank2":
        return rank2_lattice(d.n, d.loops, d.parallel_sizes)
    from .lattice import lattice_from_rank_function

    return lattice_from_rank_function(d.n, rank3_rank_function(d))

"""Command line front end: build, cache and inspect the generator matrices."""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import click

from . import cache
from .core import (
    CyclicFlatLattice,
    InvalidArgumentsError,
    SparseIntMatrix,
    descriptor_to_lattice,
    dumps_json,
)
from .expansion import MAX_INDICATOR_N, schubert_expansion_oracle, verify_expansion_indicator
from .lattice import validate_z_axioms
from .polytope import PointSet, affine_dimension, linear_rank, vertex_report
from .rank2 import build_o2, count_m2
from .rank3 import assemble_o3, build_o3, enumerate_rank3_column_states

RANK2_CAP = 80
RANK3_CAP = 10
MIN_N = 4


@dataclass
class RunConfig:
    command: str
    rank: int
    n: int
    fmt: str = "triples"
    out: str | None = None
    seed: int = 0
    threads: int = 1
    samples: int = 50
    use_cache: bool = True

    def check_range(self) -> None:
        if self.rank not in (2, 3):
            raise click.UsageError(f"rank must be 2 or 3, got {self.rank}")
        cap = RANK2_CAP if self.rank == 2 else RANK3_CAP
        if self.n < MIN_N:
            raise click.UsageError(f"n below supported range ({MIN_N} <= n <= {cap} for rank {self.rank})")
        if self.n > cap:
            raise click.UsageError(f"n above supported range ({MIN_N} <= n <= {cap} for rank {self.rank})")


# -- matrices with cache ------------------------------------------------------------------


def compute_matrix(rank: int, n: int, use_cache: bool = True) -> SparseIntMatrix:
    """O_{rank,n}, read from or written to the cache when enabled.

    For rank 3 the recursion resumes from the largest cached O_{3,k}, k < n.
    """
    if rank == 2:
        if use_cache:
            hit = cache.load(2, n)
            if hit is not None:
                return hit
        m = build_o2(n)
        if use_cache:
            cache.store(m)
        return m
    if not use_cache:
        return build_o3(n)
    hit = cache.load(3, n)
    if hit is not None:
        return hit
    k = cache.latest_below(3, n, 5)
    if k is None:
        prev = build_o3(4)
        k = 4
    else:
        prev = cache.load(3, k)
    for j in range(k + 1, n + 1):
        prev = assemble_o3(j, prev).matrix
        cache.store(prev)
    return prev


def format_matrix(m: SparseIntMatrix, fmt: str) -> str:
    if fmt == "triples":
        return m.to_triples_text()
    if fmt == "json":
        return dumps_json(m.to_json()) + "\n"
    if fmt == "csv":
        lines = ["label," + ",".join(f"c{j + 1}" for j in range(m.shape[1]))]
        for lab, row in zip(m.row_labels, m.dense()):
            lines.append(f"\"{lab}\"," + ",".join(map(str, row)))
        return "\n".join(lines) + "\n"
    raise click.UsageError(f"unknown format {fmt!r}")


def _write(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise click.UsageError(f"cannot write {out}: {exc}") from exc


def expected_tables() -> dict:
    return json.loads(resources.files("omega_matroids").joinpath("data/expected_tables.json").read_text())


def table_row(rank: int, n: int, use_cache: bool = True, vertices: bool = True) -> dict:
    m = compute_matrix(rank, n, use_cache)
    ps = PointSet.from_matrix(m)
    row = {
        "n": n,
        "dimension": affine_dimension(ps),
        "linear_rank": linear_rank(ps),
        "columns": len(ps),
    }
    if rank == 2:
        row["classes"] = count_m2(n)
    else:
        row["expansions"] = len(ps)
    if vertices:
        row["vertices"] = len(vertex_report(ps).vertices)
    return row


def compare_row(rank: int, row: dict, expected: dict) -> list[str]:
    exp = expected[f"rank{rank}"].get(str(row["n"]))
    if exp is None:
        return []
    keys = {"dimension": "dimension", "classes": "classes", "expansions": "expansions"}
    keys["vertices"] = "extremal" if rank == 2 else "vertices"
    bad = []
    for ours, theirs in keys.items():
        if ours in row and theirs in exp and row[ours] != exp[theirs]:
            bad.append(f"{ours}: got {row[ours]}, table {exp[theirs]}")
    return bad


def verify_matrix(rank: int, n: int, samples: int, seed: int, use_cache: bool = True) -> list[str]:
    """Structured failures of the oracle, indicator and cache checks (empty when all pass)."""
    failures = []
    if use_cache:
        ok, msg = cache.check(rank, n)
        if not ok:
            return [f"cache: {msg}"]
    m = compute_matrix(rank, n, use_cache)
    for j, (vec, d) in enumerate(m.columns):
        z = descriptor_to_lattice(d)
        if not validate_z_axioms(z.flats, z.n):
            failures.append(f"column {j + 1}: descriptor lattice violates the axioms ({d})")
            continue
        if schubert_expansion_oracle(z) != vec:
            failures.append(f"column {j + 1}: oracle disagrees ({d})")
            continue
        if n <= MAX_INDICATOR_N:
            res = verify_expansion_indicator(z, vec, samples, seed + j)
            if not res:
                failures.append(f"column {j + 1}: indicator mismatch at {res.counterexample} ({d})")
    if len({v for v in m.vectors()}) != len(m.columns):
        failures.append("duplicate columns")
    return failures


# -- commands -----------------------------------------------------------------------------


def _rank_n(f):
    f = click.option("--n", "n", type=int, required=True, help="ground set size")(f)
    f = click.option("--rank", type=click.IntRange(2, 3), required=True)(f)
    return f


@click.group()
@click.option("--threads", type=int, default=1, show_default=True, help="accepted; work runs in one process")
@click.option("--no-cache", is_flag=True, help="ignore OMEGA_CACHE_DIR")
@click.pass_context
def main(ctx, threads, no_cache):
    """Generator matrices of the polytope of all matroids in ranks 2 and 3."""
    ctx.obj = {"threads": threads, "use_cache": not no_cache}


@main.command()
@_rank_n
@click.option("--sorted", "sort_cols", is_flag=True, help="sort columns in reverse lexicographic order")
@click.option("--format", "fmt", type=click.Choice(["triples", "json", "csv"]), default="triples")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--states-only", is_flag=True, help="rank 3: emit loopless states without assembling")
@click.pass_context
def omega(ctx, rank, n, sort_cols, fmt, out, states_only):
    """Write O_{r,n}; with --out the descriptor sidecar goes to OUT.sidecar.json."""
    cfg = RunConfig("omega", rank, n, fmt, out, threads=ctx.obj["threads"], use_cache=ctx.obj["use_cache"])
    cfg.check_range()
    if states_only:
        if rank != 3:
            raise click.UsageError("--states-only applies to rank 3")
        lines = [
            json.dumps({"descriptor": st.descriptor.to_json(), "expansion": {str(k): v for k, v in st.coeffs.items}},
                       sort_keys=True)
            for st in enumerate_rank3_column_states(n)
        ]
        _write("\n".join(lines) + "\n", out)
        return
    m = compute_matrix(rank, n, cfg.use_cache)
    if sort_cols:
        m = m.sorted_columns()
    _write(format_matrix(m, fmt), out)
    if out is not None and fmt != "json":
        _write(dumps_json(m.sidecar()) + "\n", out + ".sidecar.json")


@main.command()
@click.option("--matroid", type=click.Path(exists=True, dir_okay=False), required=True)
def expand(matroid):
    """Schubert expansion of a matroid given by its cyclic flats (JSON)."""
    try:
        z = CyclicFlatLattice.from_json(json.loads(Path(matroid).read_text()))
    except (InvalidArgumentsError, json.JSONDecodeError, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc
    rep = validate_z_axioms(z.flats, z.n)
    if not rep:
        raise click.UsageError(f"not a lattice of cyclic flats: {rep.axiom} {rep.message}")
    if z.matroid_rank not in (2, 3):
        raise click.UsageError(f"only ranks 2 and 3 are supported, got {z.matroid_rank}")
    for lab, c in schubert_expansion_oracle(z).items:
        click.echo(f"{lab} {c}")


@main.command()
@_rank_n
@click.pass_context
def extremal(ctx, rank, n):
    """Vertices of the polytope as JSON lines with descriptors."""
    RunConfig("extremal", rank, n).check_range()
    m = compute_matrix(rank, n, ctx.obj["use_cache"])
    ps = PointSet.from_matrix(m)
    for i in vertex_report(ps).vertices:
        vec, d = m.columns[i]
        click.echo(json.dumps(
            {"column": i + 1, "descriptor": d.to_json(), "expansion": {str(k): v for k, v in vec.items}},
            sort_keys=True,
        ))


@main.command()
@_rank_n
@click.option("--certificates", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def vertices(ctx, rank, n, certificates):
    """Count vertices; optionally dump every certificate."""
    RunConfig("vertices", rank, n).check_range()
    m = compute_matrix(rank, n, ctx.obj["use_cache"])
    ps = PointSet.from_matrix(m)
    rep = vertex_report(ps)
    click.echo(f"points {len(ps)}")
    click.echo(f"vertices {len(rep.vertices)}")
    if certificates:
        _write(dumps_json({"rank": rank, "n": n, "certificates": [c.to_json() for c in rep.certificates]}) + "\n",
               certificates)


@main.command()
@_rank_n
@click.pass_context
def dimension(ctx, rank, n):
    """Affine dimension of the generator set (and the rank of the matrix)."""
    RunConfig("dimension", rank, n).check_range()
    ps = PointSet.from_matrix(compute_matrix(rank, n, ctx.obj["use_cache"]))
    click.echo(f"affine_dimension {affine_dimension(ps)}")
    click.echo(f"linear_rank {linear_rank(ps)}")


@main.command()
@click.option("--rank", type=click.IntRange(2, 3), required=True)
@click.option("--from", "lo", type=int, required=True)
@click.option("--to", "hi", type=int, required=True)
@click.option("--no-vertices", is_flag=True, help="skip vertex counts")
@click.pass_context
def table(ctx, rank, lo, hi, no_vertices):
    """Recompute table rows and flag differences from the published values."""
    expected = expected_tables()
    for n in range(lo, hi + 1):
        RunConfig("table", rank, n).check_range()
        t0 = time.perf_counter()
        row = table_row(rank, n, ctx.obj["use_cache"], not no_vertices)
        bad = compare_row(rank, row, expected)
        cells = " ".join(f"{k}={v}" for k, v in row.items())
        flag = "ok" if not bad else "MISMATCH " + "; ".join(bad)
        click.echo(f"{cells} [{time.perf_counter() - t0:.1f}s] {flag}")


@main.command()
@_rank_n
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def verify(ctx, rank, n, samples, seed):
    """Oracle equivalence, indicator identity and cache integrity; exit 1 on failure."""
    RunConfig("verify", rank, n, seed=seed, samples=samples).check_range()
    try:
        failures = verify_matrix(rank, n, samples, seed, ctx.obj["use_cache"])
    except cache.CacheIntegrityError as exc:
        failures = [f"cache: {exc}"]
    for f in failures:
        click.echo(f"FAIL {f}")
    if failures:
        ctx.exit(1)
    click.echo(f"ok rank={rank} n={n}" + ("" if n <= MAX_INDICATOR_N else " (indicator check skipped, n > 7)"))


if __name__ == "__main__":
    sys.exit(main())

"""On-disk cache of generator matrices.

One triple file plus one JSON sidecar per (rank, n, format version).  The
sidecar carries a sha256 of the triple text and of its own column list, so a
damaged entry is detected on load instead of silently reused.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .core import SparseIntMatrix

FORMAT_VERSION = 1


class CacheIntegrityError(RuntimeError):
    """A cached matrix does not match its recorded checksum."""


def cache_dir() -> Path:
    root = os.environ.get("OMEGA_CACHE_DIR")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "omega_matroids"


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _stem(r: int, n: int) -> str:
    return f"omega_r{r}_n{n}_v{FORMAT_VERSION}"


def paths(r: int, n: int, root: Path | None = None) -> tuple[Path, Path]:
    root = cache_dir() if root is None else root
    stem = _stem(r, n)
    return root / f"{stem}.triples", root / f"{stem}.json"


def store(m: SparseIntMatrix, root: Path | None = None) -> Path:
    tri, side = paths(m.r, m.n, root)
    tri.parent.mkdir(parents=True, exist_ok=True)
    text = m.to_triples_text()
    meta = m.sidecar()
    meta["version"] = FORMAT_VERSION
    meta["sha256"] = _digest(text)
    meta["columns_sha256"] = _digest(json.dumps(meta["columns"], sort_keys=True))
    # write-then-rename so a crash never leaves a half-written entry behind
    for path, payload in ((tri, text), (side, json.dumps(meta, indent=1, sort_keys=True) + "\n")):
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(payload)
        tmp.replace(path)
    return tri


def exists(r: int, n: int, root: Path | None = None) -> bool:
    tri, side = paths(r, n, root)
    return tri.exists() and side.exists()


def check(r: int, n: int, root: Path | None = None) -> tuple[bool, str]:
    """(ok, message) for the entry; a missing entry counts as ok."""
    if not exists(r, n, root):
        return True, "no cache entry"
    tri, side = paths(r, n, root)
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        return False, f"sidecar unreadable: {exc}"
    if meta.get("version") != FORMAT_VERSION:
        return False, "format version mismatch"
    if _digest(tri.read_text()) != meta.get("sha256"):
        return False, "checksum mismatch in triple file"
    if _digest(json.dumps(meta.get("columns"), sort_keys=True)) != meta.get("columns_sha256"):
        return False, "checksum mismatch in column descriptors"
    return True, "ok"


def load(r: int, n: int, root: Path | None = None) -> SparseIntMatrix | None:
    if not exists(r, n, root):
        return None
    ok, msg = check(r, n, root)
    if not ok:
        raise CacheIntegrityError(f"cached O_{{{r},{n}}}: {msg}")
    tri, side = paths(r, n, root)
    return SparseIntMatrix.from_triples_text(tri.read_text(), json.loads(side.read_text()))


def latest_below(r: int, n: int, lo: int, root: Path | None = None) -> int | None:
    """Largest cached k with lo <= k < n."""
    for k in range(n - 1, lo - 1, -1):
        if exists(r, k, root):
            return k
    return None

"""Content-addressed on-disk store for Groebner bases.

Entries are canonical text files named by the SHA-256 of their header (ring
signature, order label, sorted input generators).  A trailing checksum line
covers the whole body; entries are re-verified when read and silently
recomputed (with a warning) when anything is off.  Writes go through a
temporary file and ``os.replace`` so concurrent processes never observe a
partial entry.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Callable

from .groebner_weyl import LeftGB, WeightOrder, gb_from_stored

log = logging.getLogger(__name__)

ENV_VAR = "QHODGE_CACHE_DIR"
MAGIC = "qhodge-gb v1"


def _header(n: int, with_t: bool, order: WeightOrder, inputs: list[str]) -> str:
    lines = [MAGIC, f"ring n={n} with_t={int(with_t)}", f"order {order.label()}"]
    lines += [f"input {g}" for g in sorted(inputs)]
    return "\n".join(lines) + "\n"


def _encode_basis(polys: list[dict]) -> str:
    rows = []
    for p in polys:
        terms = sorted(p.items())
        rows.append(" ".join(",".join(map(str, e)) + ":" + str(c) for e, c in terms))
    return "".join(f"gen {r}\n" for r in rows)


def _decode_basis(lines: list[str]) -> list[dict]:
    out = []
    for line in lines:
        if not line.startswith("gen "):
            raise ValueError("malformed generator line")
        p = {}
        for tok in line[4:].split():
            exps, coeff = tok.split(":")
            p[tuple(int(x) for x in exps.split(","))] = int(coeff)
        out.append(p)
    return out


class GBCache:
    """In-memory plus optional on-disk Groebner-basis cache."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory else None
        self.memory: dict[str, LeftGB] = {}
        self.hits = 0
        self.misses = 0
        self.warnings: list[str] = []

    @classmethod
    def from_env(cls) -> "GBCache":
        return cls(os.environ.get(ENV_VAR) or None)

    def key(self, header: str) -> str:
        return hashlib.sha256(header.encode()).hexdigest()

    def path_for(self, key: str) -> Path | None:
        return self.directory / f"{key}.gb" if self.directory else None

    def serialize(self, header: str, gb: LeftGB) -> str:
        body = header + "---\n" + _encode_basis(gb.homogenized)
        digest = hashlib.sha256(body.encode()).hexdigest()
        return body + f"checksum {digest}\n"

    def _load(self, header: str, key: str, n, with_t, order, verify: Callable[[LeftGB], bool]):
        path = self.path_for(key)
        if path is None or not path.exists():
            return None
        try:
            text = path.read_text()
            body, _, tail = text.rpartition("checksum ")
            if hashlib.sha256(body.encode()).hexdigest() != tail.strip():
                raise ValueError("checksum mismatch")
            head, sep, rest = body.partition("---\n")
            if not sep or head != header:
                raise ValueError("header mismatch")
            polys = _decode_basis([l for l in rest.splitlines() if l])
            gb = gb_from_stored(n, with_t, order, polys)
            if not verify(gb):
                raise ValueError("stored basis failed re-verification")
            return gb
        except (OSError, ValueError) as exc:
            msg = f"discarding cache entry {path.name}: {exc}"
            log.warning(msg)
            self.warnings.append(msg)
            return None

    def _store(self, key: str, text: str):
        path = self.path_for(key)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".gb")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except OSError as exc:
            log.warning("could not write cache entry %s: %s", path, exc)
            try:
                os.unlink(tmp)
            except OSError:
                pass

    def get_or_compute(self, n: int, with_t: bool, order: WeightOrder, inputs: list, compute: Callable[[], LeftGB]) -> LeftGB:
        header = _header(n, with_t, order, [str(g) for g in inputs])
        key = self.key(header)
        if key in self.memory:
            self.hits += 1
            return self.memory[key]

        def verify(gb: LeftGB) -> bool:
            return all(gb.reduces_to_zero(g) for g in inputs) and all(
                gb.reduces_to_zero(g) for g in gb.generators
            )

        gb = self._load(header, key, n, with_t, order, verify)
        if gb is None:
            self.misses += 1
            gb = compute()
            self._store(key, self.serialize(header, gb))
        else:
            self.hits += 1
        self.memory[key] = gb
        return gb


_DEFAULT: GBCache | None = None


def default_cache() -> GBCache:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = GBCache.from_env()
    return _DEFAULT


def set_default_cache(cache: GBCache | None) -> None:
    global _DEFAULT
    _DEFAULT = cache

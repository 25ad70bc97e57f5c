"""On-disk store of colengths keyed by a content hash of (semigroup, ideal)."""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
import threading
from pathlib import Path

CACHE_VERSION = "1"
ENV_VAR = "PBODYLAB_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "pbodylab"


def ideal_key(semigroup_gens, ideal_gens) -> str:
    blob = json.dumps({"v": CACHE_VERSION, "S": [list(g) for g in semigroup_gens],
                       "I": [list(t) for t in ideal_gens]}, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class ColengthCache:
    """Readers may run concurrently; writes go through a temp file and os.replace."""

    def __init__(self, root: os.PathLike | str | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self._mem: dict[str, int] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self._prepare()

    def _prepare(self):
        self.root.mkdir(parents=True, exist_ok=True)
        stamp = self.root / "VERSION"
        if not stamp.exists() or stamp.read_text().strip() != CACHE_VERSION:
            for child in self.root.iterdir():
                if child.is_dir():
                    shutil.rmtree(child, ignore_errors=True)
            self._atomic_write(stamp, CACHE_VERSION)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.txt"

    def _atomic_write(self, path: Path, text: str):
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)

    def get(self, ideal) -> int | None:
        key = ideal_key(ideal.ring.semigroup.generators, ideal.generators)
        if key in self._mem:
            self.hits += 1
            return self._mem[key]
        try:
            n = int(self._path(key).read_text())
        except (OSError, ValueError):
            self.misses += 1
            return None
        self._mem[key] = n
        self.hits += 1
        return n

    def put(self, ideal, n: int):
        key = ideal_key(ideal.ring.semigroup.generators, ideal.generators)
        with self._lock:
            self._mem[key] = n
            self._atomic_write(self._path(key), str(n))


def clean_cache(root: os.PathLike | str | None = None) -> int:
    """Delete the store; returns the number of cached entries removed."""
    root = Path(root) if root is not None else default_cache_dir()
    if not root.exists():
        return 0
    n = sum(1 for _ in root.glob("*/*.txt"))
    shutil.rmtree(root)
    return n

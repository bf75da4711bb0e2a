"""Content-addressed on-disk cache for computed artifacts.

Each entry is a canonical JSON payload followed by a line 'sha256 <hex>' of
the payload.  Keys hash (cache format, package version, kind, key fields).
Writes go to a temporary file in the same directory and are renamed into
place.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

from . import __version__

log = logging.getLogger(__name__)

CACHE_FORMAT = 1


class ChecksumMismatch(ValueError):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def cache_key(kind: str, key: dict, version: str = __version__) -> str:
    blob = canonical_json({"format": CACHE_FORMAT, "version": version, "kind": kind, "key": key})
    return hashlib.sha256(blob.encode()).hexdigest()


class Cache:
    def __init__(self, root: str | Path | None, version: str = __version__):
        self.root = Path(root) if root is not None else None
        self.version = version
        self.hits = 0
        self.misses = 0
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    def path(self, digest: str) -> Path:
        return self.root / digest[:2] / f"{digest}.json"

    def key(self, kind: str, key: dict) -> str:
        return cache_key(kind, key, self.version)

    def put(self, kind: str, key: dict, payload: Any) -> str:
        digest = self.key(kind, key)
        if self.root is None:
            return digest
        body = canonical_json(payload)
        check = hashlib.sha256(body.encode()).hexdigest()
        target = self.path(digest)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(body + "\nsha256 " + check + "\n")
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return digest

    def get(self, kind: str, key: dict) -> Any:
        """Payload or None when absent; ChecksumMismatch on a corrupt entry."""
        if self.root is None:
            return None
        digest = self.key(kind, key)
        target = self.path(digest)
        if not target.exists():
            return None
        text = target.read_text()
        body, sep, tail = text.rstrip("\n").rpartition("\nsha256 ")
        if not sep or hashlib.sha256(body.encode()).hexdigest() != tail.strip():
            raise ChecksumMismatch(str(target))
        return json.loads(body)

    def get_or_compute(self, kind: str, key: dict, compute: Callable[[], Any]) -> tuple[Any, str]:
        """(payload, digest); corrupt entries are recomputed and overwritten."""
        digest = self.key(kind, key)
        try:
            payload = self.get(kind, key)
        except ChecksumMismatch:
            log.warning("corrupt cache entry %s, recomputing", digest)
            payload = None
        if payload is not None:
            self.hits += 1
            return payload, digest
        self.misses += 1
        payload = compute()
        # store and return the JSON round trip so cold and warm runs see equal data
        payload = json.loads(canonical_json(payload))
        self.put(kind, key, payload)
        return payload, digest

"""Expansion cache and table/certificate writers."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
from pathlib import Path
from typing import Callable, Iterable

from .errors import CacheCorruption
from .series import ModSeries, dumps, loads

log = logging.getLogger(__name__)

CACHE_ENV = "QCERT_CACHE_DIR"
# Bump when the expansion kernel or the dump layout changes.
CACHE_FORMAT_VERSION = 1


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "qcert"


def cache_key(source: str, modulus: int, length: int) -> str:
    raw = f"v{CACHE_FORMAT_VERSION}|{source}|{modulus}|{length}".encode()
    return hashlib.sha256(bytes([CACHE_FORMAT_VERSION]) + raw).hexdigest()


class SeriesCache:
    def __init__(self, root: Path | str | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, source: str, modulus: int, length: int) -> Path:
        return self.root / f"{cache_key(source, modulus, length)}.qser"

    def get(self, source: str, modulus: int, length: int) -> ModSeries | None:
        path = self.path(source, modulus, length)
        if not path.exists():
            return None
        series = loads(path.read_bytes())
        if series.modulus != modulus or series.length != length:
            raise CacheCorruption(f"{path}: header ({series.modulus}, {series.length}) does not match the key")
        return series

    def put(self, source: str, series: ModSeries) -> Path:
        path = self.path(source, series.modulus, series.length)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(dumps(series))
        tmp.replace(path)
        return path

    def fetch(self, source: str, modulus: int, length: int, build: Callable[[], ModSeries]) -> tuple[ModSeries, bool]:
        """Return ``(series, hit)``, building and storing on a miss."""
        cached = self.get(source, modulus, length)
        if cached is not None:
            log.info("cache hit for %s (m=%d, L=%d)", source, modulus, length)
            return cached, True
        series = build()
        self.put(source, series)
        return series, False


def coefficient_rows(values: Iterable[int], l: int) -> Iterable[tuple[int, int, int]]:
    for n, v in enumerate(values):
        yield n, v, v % l


def csv_table(values: Iterable[int], l: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "value", f"value_mod_{l}"])
    writer.writerows(coefficient_rows(values, l))
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"

"""Tables, manifests and atomic file output shared by every experiment."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__

__all__ = ["Table", "fmt", "atomic_write", "write_table", "write_manifest", "sha256_text",
           "load_manifest"]


def fmt(value):
    """Shortest round-trip text for a cell; floats keep every bit."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


@dataclass
class Table:
    """Header plus rows; the unit every experiment emits."""

    header: tuple
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.header = tuple(self.header)
        for row in self.rows:
            self._check(row)

    def _check(self, row):
        if len(row) != len(self.header):
            raise ValueError(f"row has {len(row)} cells, header has {len(self.header)}")

    def append(self, row):
        self._check(row)
        self.rows.append(tuple(row))

    def column(self, name):
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()


def sha256_text(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def atomic_write(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path, table):
    text = table.to_csv()
    atomic_write(path, text)
    return sha256_text(text)


def _jsonable(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _jsonable(obj.item())
    return obj


def write_manifest(path, command, config, tables, summary, duration, status="ok"):
    """Side-car JSON echoing the resolved config and table checksums."""
    manifest = {
        "tool": "fraccarleson",
        "version": __version__,
        "command": command,
        "status": status,
        "config": config,
        "tables": tables,
        "summary": summary,
        "duration_seconds": duration,
    }
    atomic_write(path, json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return manifest


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

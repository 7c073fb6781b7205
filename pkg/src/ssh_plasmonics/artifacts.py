"""Deterministic artifact writers and readers: CSV tables and 16-bit PGM images.

CSV files carry '#'-prefixed metadata lines, one header row and values
formatted with 12 significant digits. PGM files are binary (P5), 16-bit
big-endian, scaled so the global maximum maps to 65535, with grid metadata in
a single '#' comment line. All writes go through a temporary file in the
target directory followed by an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

PGM_MAX = 65535
FLOAT_FORMAT = ".12g"


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta_lines(meta: Mapping[str, object]) -> list[str]:
    return [f"# {key}: {format_value(value)}" for key, value in meta.items()]


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence],
              meta: Mapping[str, object] | None = None) -> None:
    lines = _meta_lines(meta or {})
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(format_value(v) for v in row))
    atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))


@dataclass(frozen=True)
class CsvTable:
    meta: dict[str, str]
    header: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> np.ndarray:
        """Column ``name`` converted to float."""
        j = self.header.index(name)
        return np.array([float(r[j]) for r in self.rows])


def read_csv(path: Path) -> CsvTable:
    meta: dict[str, str] = {}
    header = None
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path}: no header row")
    return CsvTable(meta, header, rows)


def to_pgm_counts(data: np.ndarray) -> np.ndarray:
    """Scale non-negative data to integers 0..65535 with the global maximum at 65535."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("graymap data must be 2-D")
    if np.any(data < 0) or not np.all(np.isfinite(data)):
        raise ValueError("graymap data must be finite and non-negative")
    peak = data.max() if data.size else 0.0
    if peak <= 0:
        return np.zeros(data.shape, dtype=np.uint16)
    return np.rint(data * (PGM_MAX / peak)).astype(np.uint16)


def write_pgm(path: Path, data: np.ndarray, meta: Mapping[str, object] | None = None) -> float:
    """Write ``data`` (rows = image lines) as a P5 graymap. Returns the scale maximum."""
    counts = to_pgm_counts(data)
    rows, cols = counts.shape
    comment = " ".join(f"{k}={format_value(v)}" for k, v in (meta or {}).items())
    head = f"P5\n# {comment}\n{cols} {rows}\n{PGM_MAX}\n".encode("ascii")
    atomic_write(path, head + counts.astype(">u2").tobytes())
    return float(np.max(data)) if counts.size else 0.0


@dataclass(frozen=True)
class Graymap:
    counts: np.ndarray
    meta: dict[str, str]
    maxval: int


def read_pgm(path: Path) -> Graymap:
    raw = Path(path).read_bytes()
    tokens: list[bytes] = []
    meta: dict[str, str] = {}
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            end = raw.index(b"\n", pos)
            for item in raw[pos + 1:end].decode("ascii").split():
                key, _, value = item.partition("=")
                meta[key] = value
            pos = end + 1
            continue
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary graymap")
    cols, rows, maxval = (int(t) for t in tokens[1:])
    pos += 1  # single whitespace before the raster
    dtype = ">u2" if maxval > 255 else "u1"
    counts = np.frombuffer(raw, dtype=dtype, count=rows * cols, offset=pos).reshape(rows, cols)
    return Graymap(counts.astype(np.int64), meta, maxval)


def write_json(path: Path, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    atomic_write(path, text.encode("utf-8"))


def write_text(path: Path, text: str) -> None:
    atomic_write(path, text.encode("utf-8"))

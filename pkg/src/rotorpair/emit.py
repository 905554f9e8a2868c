"""Structured result emission: CSV series, binary grids, JSON manifests.

Grid file layout (extension .lewg): a 32-byte header of magic b"LEWG",
uint32 kind code, uint64 rows, uint64 cols, 8 reserved zero bytes, all
little-endian, followed by row-major float64 payload. Total size is exactly
32 + 8*rows*cols bytes.

All writers format floats with Python repr (shortest round-trip), so a rerun
with the same config and seed reproduces every byte. Manifests are canonical
JSON (sorted keys); wall-clock timing sits under the single top-level
"timing" key, which is the one field a determinism comparison must drop.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

GRID_MAGIC = b"LEWG"
GRID_KIND_CODES = {"wigner": 0, "husimi": 1, "classical": 2}
GRID_KIND_NAMES = {v: k for k, v in GRID_KIND_CODES.items()}
_HEADER = struct.Struct("<4sIQQ8x")

PURITY_HEADER = "t,P,P_stderr"
DISTANCES_HEADER = "label,N,eps,distance"


class GridFormatError(ValueError):
    pass


def write_purity_csv(path, series) -> int:
    """Rows t,P,P_stderr for t = 0..n_kicks; returns the row count."""
    lines = [PURITY_HEADER]
    for t, p, se in zip(series.times, series.values, series.stderr):
        lines.append(f"{int(t)},{float(p)!r},{float(se)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines) - 1


def read_purity_csv(path):
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0] != PURITY_HEADER:
        raise ValueError(f"{path}: expected header {PURITY_HEADER!r}")
    t, p, se = [], [], []
    for line in text[1:]:
        a, b, c = line.split(",")
        t.append(int(a))
        p.append(float(b))
        se.append(float(c))
    return np.array(t), np.array(p), np.array(se)


def write_rescaled_csv(path, times, values, stderr) -> int:
    """Purity-format rows with float (rescaled) times; returns the row count."""
    lines = [PURITY_HEADER]
    for t, p, se in zip(times, values, stderr):
        lines.append(f"{float(t)!r},{float(p)!r},{float(se)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines) - 1


def write_distances_csv(path, rows) -> int:
    """rows: iterable of (label, N, eps, distance)."""
    lines = [DISTANCES_HEADER]
    for label, n, eps, dist in rows:
        lines.append(f"{label},{int(n)},{float(eps)!r},{float(dist)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines) - 1


def write_grid(path, values: np.ndarray, kind: str) -> int:
    """Binary grid dump; returns bytes written."""
    if kind not in GRID_KIND_CODES:
        raise GridFormatError(f"unknown grid kind {kind!r}")
    arr = np.ascontiguousarray(np.asarray(values, dtype="<f8"))
    if arr.ndim != 2:
        raise GridFormatError(f"grid must be 2d, got shape {arr.shape}")
    rows, cols = arr.shape
    header = _HEADER.pack(GRID_MAGIC, GRID_KIND_CODES[kind], rows, cols)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes(order="C"))
    return _HEADER.size + 8 * rows * cols


def read_grid(path):
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise GridFormatError(f"{path}: truncated header")
    magic, kind_code, rows, cols = _HEADER.unpack_from(raw)
    if magic != GRID_MAGIC:
        raise GridFormatError(f"{path}: bad magic {magic!r}")
    if kind_code not in GRID_KIND_NAMES:
        raise GridFormatError(f"{path}: unknown kind code {kind_code}")
    expect = _HEADER.size + 8 * rows * cols
    if len(raw) != expect:
        raise GridFormatError(f"{path}: size {len(raw)} != expected {expect}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(rows, cols)
    return values.copy(), GRID_KIND_NAMES[kind_code]


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(
        json.dumps(manifest, sort_keys=True, indent=2, allow_nan=False) + "\n",
        encoding="utf-8",
    )


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def manifest_without_timing(manifest: dict) -> dict:
    return {k: v for k, v in manifest.items() if k != "timing"}

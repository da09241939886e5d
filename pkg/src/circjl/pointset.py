"""Point-set files.

Binary layout: ``b"CJL1"``, little-endian ``u32 d``, ``u32 n``, then ``n*d``
little-endian float64 values, row-major. CSV: one point per line, ``d``
comma-separated decimals, no header.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import PointSetParseError

MAGIC = b"CJL1"
HEADER = struct.Struct("<4sII")
FORMATS = ("csv", "binary")


def detect_format(path) -> str:
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    return "binary" if head == MAGIC else "csv"


def read_points(path, fmt: str | None = None) -> np.ndarray:
    fmt = fmt or detect_format(path)
    if fmt == "binary":
        return read_binary(path)
    if fmt == "csv":
        return read_csv(path)
    raise ValueError(f"unknown format {fmt!r}")


def write_points(path, data, fmt: str) -> None:
    if fmt == "binary":
        write_binary(path, data)
    elif fmt == "csv":
        write_csv(path, data)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_binary(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise PointSetParseError("truncated header", f"byte {len(raw)}")
    magic, d, n = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise PointSetParseError(f"bad magic {magic!r}, expected {MAGIC!r}", "byte 0")
    expected = HEADER.size + 8 * d * n
    if len(raw) != expected:
        where = min(len(raw), expected)
        raise PointSetParseError(
            f"payload size mismatch: header says {n} x {d} float64 ({expected} bytes total), "
            f"file has {len(raw)} bytes", f"byte {where}")
    data = np.frombuffer(raw, dtype="<f8", count=n * d, offset=HEADER.size)
    return data.reshape(n, d).astype(np.float64)


def write_binary(path, data) -> None:
    data = np.ascontiguousarray(data, dtype="<f8")
    if data.ndim != 2:
        raise ValueError("point data must be a 2-D (n, d) array")
    n, d = data.shape
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, d, n))
        fh.write(data.tobytes(order="C"))


def read_csv(path) -> np.ndarray:
    rows = []
    d = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise PointSetParseError(f"non-numeric field: {exc}", f"line {lineno}") from None
            if d is None:
                d = len(row)
            elif len(row) != d:
                raise PointSetParseError(f"expected {d} fields, found {len(row)}", f"line {lineno}")
            rows.append(row)
    if not rows:
        raise PointSetParseError("no points found", "line 1")
    return np.array(rows, dtype=np.float64)


def write_csv(path, data) -> None:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("point data must be a 2-D (n, d) array")
    with open(path, "w", encoding="utf-8") as fh:
        for row in data:
            # repr round-trips float64 exactly
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")

"""Binary PGM (P5) and plain-text CSV matrices for images and masks."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import InvalidMask, ParseError

IMAGE_SUFFIXES = (".pgm", ".csv", ".txt")

_TOKEN = re.compile(rb"(#[^\n]*\n?)|(\S+)")


def _header_tokens(data: bytes, count: int, source: str) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        m = _TOKEN.search(data, pos)
        if m is None:
            raise ParseError(f"{source}: truncated PGM header")
        pos = m.end()
        if m.group(2) is not None:
            tokens.append(m.group(2))
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    path = Path(path)
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise ParseError(f"{path}: not a binary PGM (missing P5 magic)")
    tokens, pos = _header_tokens(data, 4, str(path))
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as exc:
        raise ParseError(f"{path}: malformed PGM header {tokens!r}") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ParseError(f"{path}: invalid PGM dimensions or maxval")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    need = width * height * dtype.itemsize
    raster = data[pos:pos + need]
    if len(raster) != need:
        raise ParseError(f"{path}: expected {need} raster bytes, found {len(raster)}")
    return np.frombuffer(raster, dtype=dtype).reshape(height, width).astype(float)


def write_pgm(path, pixels, maxval: int = 255) -> None:
    a = np.asarray(pixels)
    if a.ndim != 2:
        raise ValueError("PGM needs a 2-D array")
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    a = np.clip(np.rint(a), 0, maxval).astype(dtype)
    header = f"P5\n{a.shape[1]} {a.shape[0]}\n{maxval}\n".encode()
    Path(path).write_bytes(header + a.tobytes())


def read_matrix_csv(path) -> np.ndarray:
    path = Path(path)
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in re.split(r"[,\s]+", line) if v])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise ParseError(f"{path}: matrix rows are empty or ragged")
    return np.array(rows, dtype=float)


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    return read_matrix_csv(path)


def read_mask(path) -> np.ndarray:
    """Mask as a 0/1 integer grid; PGM masks use 0 and 255 (0/1 is accepted too)."""
    a = read_image(path)
    values = set(np.unique(a).tolist())
    if values <= {0.0, 1.0}:
        return a.astype(np.int8)
    if Path(path).suffix.lower() == ".pgm" and values <= {0.0, 255.0}:
        return (a > 0).astype(np.int8)
    raise InvalidMask(f"{path}: mask values must be binary, found {sorted(values)[:5]}")

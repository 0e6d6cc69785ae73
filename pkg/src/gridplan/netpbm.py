"""Minimal binary netpbm readers/writers (PPM P6 and PGM P5, maxval 255).

Writers emit the canonical header ``P6\\n<w> <h>\\n255\\n`` (one whitespace
character after each header token) so that identical arrays always produce
byte-identical files.  Readers tolerate any whitespace between header tokens.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError


def _parse_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Return (width, height, offset-of-raster) for a P5/P6 header."""
    if not data.startswith(magic):
        raise FormatError(f"expected {magic.decode()} header")
    pos = len(magic)
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token:
            raise FormatError("truncated netpbm header")
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise FormatError(f"bad header token {token!r}") from exc
    if pos >= len(data):
        raise FormatError("missing raster data")
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise FormatError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}")
    return width, height, pos


def write_ppm(path, rgb: np.ndarray) -> None:
    """Write an (h, w, 3) uint8 array as binary PPM."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    w, h, pos = _parse_header(data, b"P6")
    raster = data[pos : pos + w * h * 3]
    if len(raster) != w * h * 3:
        raise FormatError(f"raster size mismatch in {path}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3).copy()


def write_pgm(path, gray: np.ndarray) -> None:
    """Write an (h, w) uint8 array as binary PGM."""
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(gray.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    w, h, pos = _parse_header(data, b"P5")
    raster = data[pos : pos + w * h]
    if len(raster) != w * h:
        raise FormatError(f"raster size mismatch in {path}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()

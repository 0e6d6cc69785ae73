"""Binary netpbm I/O for the dataset exchange formats.

The planner side defines the formats: maps are PPM P6 (red=occupied,
green=start cell, blue=goal cell) and masks are PGM P5 (255=predicted).
This module is intentionally self-contained; the file format is the only
contract shared with the planning package.
"""

from __future__ import annotations

import numpy as np


class FormatError(ValueError):
    pass


def _parse_header(data: bytes, magic: bytes):
    if not data.startswith(magic):
        raise FormatError(f"expected {magic.decode()} file")
    pos = len(magic)
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated header")
        fields.append(int(data[start:pos]))
    pos += 1
    w, h, maxval = fields
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}")
    return w, h, pos


def read_ppm(path) -> np.ndarray:
    data = open(path, "rb").read()
    w, h, pos = _parse_header(data, b"P6")
    raster = data[pos : pos + w * h * 3]
    if len(raster) != w * h * 3:
        raise FormatError(f"short raster in {path}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3).copy()


def read_pgm(path) -> np.ndarray:
    data = open(path, "rb").read()
    w, h, pos = _parse_header(data, b"P5")
    raster = data[pos : pos + w * h]
    if len(raster) != w * h:
        raise FormatError(f"short raster in {path}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def write_pgm(path, gray: np.ndarray) -> None:
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(gray.tobytes())

"""Binary PGM (P5) input/output for 8-bit grayscale images.

Images are plain ``numpy.ndarray`` objects of shape ``(M, N)`` and dtype
``uint8``. Both dimensions must be multiples of 4 (the block size) and at
least 8.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import DimensionError, MalformedFormat, UnsupportedDepth

BLOCK = 4


def check_image(image: np.ndarray) -> np.ndarray:
    """Validate an image array and return it as a C-contiguous uint8 array."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    m, n = arr.shape
    if m < 8 or n < 8:
        raise DimensionError(f"image {m}x{n} is smaller than 8x8")
    if m % BLOCK or n % BLOCK:
        raise DimensionError(f"image {m}x{n} is not divisible by the block size {BLOCK}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise DimensionError("sample values outside [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def _header_tokens(data: bytes) -> tuple[list[bytes], int]:
    # Returns the four header tokens and the offset of the first sample byte.
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise MalformedFormat("truncated PGM header")
        c = data[pos:pos + 1]
        if c == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
                pos += 1
            tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise MalformedFormat("missing whitespace after maxval")
    return tokens, pos + 1


def parse_pgm(data: bytes) -> np.ndarray:
    tokens, offset = _header_tokens(data)
    if tokens[0] != b"P5":
        raise MalformedFormat(f"bad magic {tokens[0]!r}, expected b'P5'")
    try:
        n, m, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise MalformedFormat(f"non-numeric PGM header field: {exc}") from None
    if n <= 0 or m <= 0:
        raise MalformedFormat(f"invalid dimensions {n}x{m}")
    if maxval != 255:
        raise UnsupportedDepth(f"maxval {maxval} is not supported (only 255)")
    body = data[offset:offset + m * n]
    if len(body) < m * n:
        raise MalformedFormat(f"expected {m * n} samples, found {len(body)}")
    return check_image(np.frombuffer(body, dtype=np.uint8).reshape(m, n).copy())


def load_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read a binary PGM file, returning its samples unchanged."""
    return parse_pgm(Path(path).read_bytes())


def pgm_bytes(image: np.ndarray) -> bytes:
    arr = check_image(image)
    m, n = arr.shape
    return b"P5\n%d %d\n255\n" % (n, m) + arr.tobytes()


def store_pgm(image: np.ndarray, path: str | os.PathLike) -> None:
    """Write ``image`` as a binary PGM file (maxval 255)."""
    Path(path).write_bytes(pgm_bytes(image))


def iter_corpus(directory: str | os.PathLike) -> Iterator[Path]:
    """Yield the ``*.pgm`` files of a directory in sorted (deterministic) order."""
    yield from sorted(p for p in Path(directory).iterdir()
                      if p.is_file() and p.suffix.lower() == ".pgm")

"""Adaptive binary arithmetic coder used for the label maps.

Frozen parameters (part of container version 1):

* 32-bit ``low``/``range`` registers, initial range ``2**32 - 1``;
* bitwise renormalisation while ``range < 2**31``; a carry out of ``low``
  is propagated into the bits already emitted;
* one adaptive context with counts ``(1, 1)``; both counts are halved
  (rounding up) once their total reaches ``2**16``;
* the split for symbol 0 is ``range * c0 // (c0 + c1)``;
* termination emits the shortest bit string ``v`` (implicitly padded with
  zeros) such that ``low <= v < low + range``.

The decoder reads zeros past the end of the code; reading more than 32
padding bits means the code was truncated.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DecodeOverrun

PRECISION = 32
FULL = 1 << PRECISION
MASK = FULL - 1
HALF = 1 << (PRECISION - 1)
COUNT_LIMIT = 1 << 16


def _as_bits(bits: Sequence[int] | np.ndarray) -> list[int]:
    return np.asarray(bits, dtype=np.uint8).ravel().tolist()


def _carry(out: list[int]) -> None:
    i = len(out) - 1
    while out[i]:
        out[i] = 0
        i -= 1
    out[i] = 1


def ac_encode(bits: Sequence[int] | np.ndarray) -> np.ndarray:
    """Encode a bit sequence; returns the code as a uint8 array of bits."""
    out: list[int] = []
    low = 0
    rng = MASK
    c0 = c1 = 1
    for b in _as_bits(bits):
        r0 = rng * c0 // (c0 + c1)
        if b:
            low += r0
            rng -= r0
            c1 += 1
        else:
            rng = r0
            c0 += 1
        if c0 + c1 >= COUNT_LIMIT:
            c0 = (c0 + 1) >> 1
            c1 = (c1 + 1) >> 1
        if low >= FULL:
            _carry(out)
            low -= FULL
        while rng < HALF:
            out.append(low >> (PRECISION - 1))
            low = (low << 1) & MASK
            rng <<= 1
    # shortest zero-padded value inside [low, low + rng)
    for k in range(PRECISION + 1):
        step = 1 << (PRECISION - k)
        v = -(-low // step) * step
        if v < low + rng:
            break
    if v >= FULL:
        _carry(out)
        v -= FULL
    out.extend((v >> (PRECISION - 1 - i)) & 1 for i in range(k))
    return np.array(out, dtype=np.uint8)


def ac_decode(code: Sequence[int] | np.ndarray, n: int) -> np.ndarray:
    """Decode ``n`` symbols from ``code``."""
    src = _as_bits(code)
    limit = len(src) + PRECISION
    src.extend([0] * PRECISION)
    pos = PRECISION
    diff = 0
    for b in src[:PRECISION]:
        diff = (diff << 1) | b
    rng = MASK
    c0 = c1 = 1
    out = bytearray(n)
    for i in range(n):
        r0 = rng * c0 // (c0 + c1)
        if diff < r0:
            rng = r0
            c0 += 1
        else:
            out[i] = 1
            diff -= r0
            rng -= r0
            c1 += 1
        if c0 + c1 >= COUNT_LIMIT:
            c0 = (c0 + 1) >> 1
            c1 = (c1 + 1) >> 1
        while rng < HALF:
            if pos >= limit:
                raise DecodeOverrun(f"code exhausted after {i + 1} of {n} symbols")
            diff = (diff << 1) | (src[pos] if pos < len(src) else 0)
            pos += 1
            rng <<= 1
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()

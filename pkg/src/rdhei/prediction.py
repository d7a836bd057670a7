"""MED prediction, prediction errors and the eight-plane PE representation.

Every pixel is turned into an 8-bit code word that is then sliced into bit
planes (plane 1 = most significant):

* reference pixels (first row / first column) and overflow pixels store the
  raw sample ``x``;
* every other pixel stores ``2*|e| + s`` where ``s = 1`` iff ``e < 0``, so
  planes 1..7 carry the 7-bit magnitude and plane 8 carries the sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentLabels, RangeError
from .raster_io import check_image

OVERFLOW_LIMIT = 64
NPLANES = 8


def med_predict(x1: int, x2: int, x3: int) -> int:
    """Median edge detector.

    ``x1`` is the upper-left neighbour, ``x2`` the upper and ``x3`` the left
    one. The gradient branch may leave [0, 255]; that value is returned as is.
    """
    hi, lo = (x2, x3) if x2 >= x3 else (x3, x2)
    if x1 <= lo:
        return hi
    if x1 >= hi:
        return lo
    return x2 + x3 - x1


def med_predict_array(x1: np.ndarray, x2: np.ndarray, x3: np.ndarray) -> np.ndarray:
    x1, x2, x3 = (np.asarray(a, dtype=np.int32) for a in (x1, x2, x3))
    hi = np.maximum(x2, x3)
    lo = np.minimum(x2, x3)
    return np.where(x1 <= lo, hi, np.where(x1 >= hi, lo, x2 + x3 - x1))


def reference_mask(shape: tuple[int, int]) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[0, :] = True
    mask[:, 0] = True
    return mask


@dataclass(frozen=True)
class PeImage:
    """Prediction errors plus the overflow label map (L1)."""

    pe: np.ndarray        # int16, shape (M, N)
    overflow: np.ndarray  # bool, shape (M, N)

    @property
    def shape(self) -> tuple[int, int]:
        return self.pe.shape

    @property
    def reference(self) -> np.ndarray:
        return reference_mask(self.pe.shape)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeImage):
            return NotImplemented
        return (np.array_equal(self.pe, other.pe)
                and np.array_equal(self.overflow, other.overflow))

    __hash__ = None  # type: ignore[assignment]


def compute_pe(image: np.ndarray) -> PeImage:
    x = check_image(image).astype(np.int32)
    pe = x.copy()
    px = med_predict_array(x[:-1, :-1], x[:-1, 1:], x[1:, :-1])
    e = x[1:, 1:] - px
    over = (e < -OVERFLOW_LIMIT) | (e > OVERFLOW_LIMIT)
    pe[1:, 1:] = np.where(over, x[1:, 1:], e)
    overflow = np.zeros(x.shape, dtype=bool)
    overflow[1:, 1:] = over
    return PeImage(pe.astype(np.int16), overflow)


def code_words(pe: PeImage) -> np.ndarray:
    """The per-pixel 8-bit code word whose bits form the planes."""
    e = pe.pe.astype(np.int32)
    raw = pe.overflow | pe.reference
    signed = (np.abs(e) << 1) | (e < 0)
    return np.where(raw, e, signed).astype(np.uint8)


def bytes_to_planes(words: np.ndarray) -> np.ndarray:
    """Slice an (M, N) uint8 array into an (8, M, N) array of bits, MSB first."""
    words = np.asarray(words, dtype=np.uint8)
    shifts = np.arange(NPLANES - 1, -1, -1, dtype=np.uint8).reshape(-1, 1, 1)
    return ((words[None, :, :] >> shifts) & 1).astype(np.uint8)


def planes_to_bytes(planes: np.ndarray) -> np.ndarray:
    planes = np.asarray(planes, dtype=np.uint8)
    weights = (1 << np.arange(NPLANES - 1, -1, -1)).astype(np.uint8).reshape(-1, 1, 1)
    return (planes * weights).sum(axis=0, dtype=np.uint16).astype(np.uint8)


def pe_to_planes(pe: PeImage) -> np.ndarray:
    return bytes_to_planes(code_words(pe))


def planes_to_pe(planes: np.ndarray, overflow: np.ndarray,
                 reference: np.ndarray | None = None) -> PeImage:
    words = planes_to_bytes(planes).astype(np.int32)
    overflow = np.asarray(overflow, dtype=bool)
    if reference is None:
        reference = reference_mask(words.shape)
    raw = overflow | reference
    mag = words >> 1
    neg = (words & 1).astype(bool)
    bad = ~raw & ((mag > OVERFLOW_LIMIT) | (neg & (mag == 0)))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise InconsistentLabels(
            f"non-overflow code word {words[i, j]} at ({i}, {j}) is not a valid PE")
    e = np.where(raw, words, np.where(neg, -mag, mag))
    return PeImage(e.astype(np.int16), overflow.copy())


def reconstruct_image(pe: PeImage) -> np.ndarray:
    """Invert :func:`compute_pe` by a raster-order causal scan."""
    e = pe.pe.astype(np.int64)
    m, n = e.shape
    if (e[0, :].min() < 0 or e[0, :].max() > 255
            or e[:, 0].min() < 0 or e[:, 0].max() > 255):
        raise RangeError("reference pixel outside [0, 255]")
    out = np.empty((m, n), dtype=np.uint8)
    out[0, :] = e[0, :]
    prev = e[0, :].tolist()
    e_rows = e.tolist()
    ovf_rows = pe.overflow.tolist()
    for i in range(1, m):
        er = e_rows[i]
        ov = ovf_rows[i]
        left = er[0]
        row = [left]
        for j in range(1, n):
            if ov[j]:
                x = er[j]
            else:
                x1 = prev[j - 1]
                x2 = prev[j]
                if x2 >= left:
                    hi, lo = x2, left
                else:
                    hi, lo = left, x2
                if x1 <= lo:
                    x = hi + er[j]
                elif x1 >= hi:
                    x = lo + er[j]
                else:
                    x = x2 + left - x1 + er[j]
            if x < 0 or x > 255:
                raise RangeError(f"reconstructed sample {x} at ({i}, {j}) outside [0, 255]")
            row.append(x)
            left = x
        out[i, :] = row
        prev = row
    return out

"""4x4 block classification and NUBs-first rearrangement of bit planes.

A plane of shape ``(M, N)`` is viewed as ``B = (M/4)*(N/4)`` blocks in
row-major block order; each block is flattened to 16 cells in raster order
(cell 15 is the bottom-right one, used as the predictor of a uniform block).

Non-uniform blocks are split into four 2x2 quadrants. In every quadrant the
cell that touches the block centre is the payload cell ``P``; the other three
cells of the quadrant are its neighbours::

    0  1 |  2  3          TL: P=5   neighbours 0, 1, 4
    4 [5]|[6] 7           TR: P=6   neighbours 2, 3, 7
    -----+------          BL: P=9   neighbours 8, 12, 13
    8 [9]|[10] 11         BR: P=10  neighbours 11, 14, 15
    12 13| 14 15
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, LabelLengthMismatch

K = 4
CELLS = K * K
PREDICTOR = CELLS - 1
P_CELLS = np.array([5, 6, 9, 10])
NEIGHBOUR_CELLS = np.array([[0, 1, 4], [2, 3, 7], [8, 12, 13], [11, 14, 15]])


def to_blocks(plane: np.ndarray) -> np.ndarray:
    """(M, N) plane -> (B, 16) array of blocks in scan order."""
    m, n = plane.shape
    if m % K or n % K:
        raise DimensionError(f"plane {m}x{n} is not divisible by {K}")
    return (np.asarray(plane).reshape(m // K, K, n // K, K)
            .transpose(0, 2, 1, 3).reshape(-1, CELLS))


def from_blocks(blocks: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    m, n = shape
    return (np.asarray(blocks).reshape(m // K, n // K, K, K)
            .transpose(0, 2, 1, 3).reshape(m, n))


def block_count(shape: tuple[int, int]) -> int:
    return (shape[0] // K) * (shape[1] // K)


def part_verdicts(blocks: np.ndarray) -> np.ndarray:
    """Per-quadrant pass/fail for a (K, 16) stack of blocks -> (K, 4) bool.

    A quadrant passes when its payload cell equals the majority of its three
    neighbours.
    """
    blocks = np.asarray(blocks).reshape(-1, CELLS)
    p = blocks[:, P_CELLS].astype(np.int8)
    votes = blocks[:, NEIGHBOUR_CELLS].sum(axis=2)
    return p == (votes >= 2)


def nub_embeddable(block: np.ndarray) -> tuple[int, tuple[bool, bool, bool, bool]]:
    """Return ``(flag, verdicts)`` for one 4x4 block; flag 0 means embeddable."""
    verdicts = part_verdicts(np.asarray(block).reshape(1, CELLS))[0]
    return (0 if verdicts.all() else 1), tuple(bool(v) for v in verdicts)


def majority_restore(blocks: np.ndarray) -> np.ndarray:
    """Set every payload cell to the majority of its neighbours (copy)."""
    out = np.array(blocks, copy=True).reshape(-1, CELLS)
    out[:, P_CELLS] = (out[:, NEIGHBOUR_CELLS].sum(axis=2) >= 2)
    return out


def broadcast_restore(blocks: np.ndarray) -> np.ndarray:
    """Overwrite all cells of each block with its predictor cell (copy)."""
    blocks = np.asarray(blocks).reshape(-1, CELLS)
    return np.repeat(blocks[:, PREDICTOR:], CELLS, axis=1)


@dataclass
class BlockModel:
    """UB/NUB structure of one plane.

    ``l2`` covers the classifiable blocks in scan order (1 = NUB). With
    ``reserved`` set, the last spatial block is excluded from classification
    and stays in place.
    """

    shape: tuple[int, int]
    l2: np.ndarray
    nub_flags: np.ndarray
    reserved: bool = False
    permutation: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.l2 = np.asarray(self.l2, dtype=np.uint8)
        self.nub_flags = np.asarray(self.nub_flags, dtype=np.uint8)
        self.permutation = nubs_first(self.l2)

    @property
    def n_blocks(self) -> int:
        return len(self.l2)

    @property
    def n_nub(self) -> int:
        return int(self.l2.sum())

    @property
    def n_ub(self) -> int:
        return self.n_blocks - self.n_nub

    @property
    def n_embeddable_nub(self) -> int:
        return int((self.nub_flags == 0).sum())


def nubs_first(l2: np.ndarray) -> np.ndarray:
    """Slot -> source-block permutation: NUBs then UBs, each in scan order."""
    l2 = np.asarray(l2)
    return np.concatenate([np.flatnonzero(l2 == 1), np.flatnonzero(l2 == 0)])


def classifiable(shape: tuple[int, int], reserved: bool) -> int:
    return block_count(shape) - (1 if reserved else 0)


def classify_blocks(plane: np.ndarray, reserved: bool = False) -> BlockModel:
    blocks = to_blocks(plane)
    if reserved:
        blocks = blocks[:-1]
    l2 = (blocks.min(axis=1) != blocks.max(axis=1)).astype(np.uint8)
    verdicts = part_verdicts(blocks[l2 == 1])
    flags = (~verdicts.all(axis=1)).astype(np.uint8)
    return BlockModel(tuple(plane.shape), l2, flags, reserved)


def rearrange(plane: np.ndarray, model: BlockModel) -> np.ndarray:
    blocks = to_blocks(plane).copy()
    n = model.n_blocks
    blocks[:n] = blocks[:n][model.permutation]
    return from_blocks(blocks, plane.shape)


def inverse_rearrange(plane: np.ndarray, l2: np.ndarray, reserved: bool = False) -> np.ndarray:
    l2 = np.asarray(l2)
    n = classifiable(plane.shape, reserved)
    if len(l2) != n:
        raise LabelLengthMismatch(f"label map has {len(l2)} entries, plane has {n} blocks")
    blocks = to_blocks(plane).copy()
    restored = np.empty_like(blocks[:n])
    restored[nubs_first(l2)] = blocks[:n]
    blocks[:n] = restored
    return from_blocks(blocks, plane.shape)

"""Bit-exact layout of the auxiliary data inside the rearranged planes.

Container version 1
-------------------
Header block
    The last spatial 4x4 block of plane 1 is reserved. Its cells 0..7 hold
    the plane flags (cell ``p-1`` is 1 iff plane ``p`` is embeddable), cells
    8..15 the version byte. It is never classified, rearranged, encrypted or
    overwritten; its original 16 bits travel in the global record.

Aux stream of a flagged plane
    Written into the plane's data cells walking the block slots from the last
    one backwards (skipping the header block on plane 1), inside each block
    from cell 14 down to cell 0. Cell 15 (the UB predictor) is never used.
    The address sequence depends only on the plane dimensions.

    plane record   mode(1) l2Len(16) l2Coded(l2Len) nubFlags(popcount(L2))
    global record  headerBits(16) l1Mode(1) l1Len(32) l1Coded(l1Len)

    The global record follows the plane record of the first flagged plane.
    ``mode`` 0 means arithmetic coded, 1 means raw. Integers are big-endian.

Capacity
    Plane ``p`` with ``u`` uniform blocks and aux size ``A`` is embeddable iff
    ``15*u >= A``. Its payload cells are the four payload cells of every
    embeddable NUB (slot order, quadrants TL, TR, BL, BR) followed by the
    UB data cells in forward order that the aux stream does not occupy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import blocks as blk
from .entropy import ac_decode, ac_encode
from .errors import (CapacityError, DecodeOverrun, LayoutMismatch, MalformedAux,
                     VersionMismatch)
from .prediction import NPLANES

VERSION = 1
HEADER_BITS = 16
L2_LEN_BITS = 16
L1_LEN_BITS = 32
DATA_CELLS = blk.CELLS - 1


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_int(bits: Sequence[int] | np.ndarray) -> int:
    v = 0
    for b in np.asarray(bits, dtype=np.uint8).tolist():
        v = (v << 1) | b
    return v


def encode_map(bits: np.ndarray) -> tuple[int, np.ndarray]:
    """Arithmetic-code a label map, falling back to raw when that is not shorter."""
    bits = np.asarray(bits, dtype=np.uint8)
    coded = ac_encode(bits)
    if len(coded) >= len(bits):
        return 1, bits.copy()
    return 0, coded


def decode_map(mode: int, coded: np.ndarray, n: int) -> np.ndarray:
    if mode == 1:
        if len(coded) != n:
            raise MalformedAux(f"raw map has {len(coded)} bits, expected {n}")
        return np.asarray(coded, dtype=np.uint8).copy()
    try:
        return ac_decode(coded, n)
    except DecodeOverrun as exc:
        raise MalformedAux(f"label map does not decode: {exc}") from None


@dataclass(eq=False)
class PlaneRecord:
    mode: int
    l2_coded: np.ndarray
    nub_flags: np.ndarray

    @classmethod
    def from_model(cls, model: blk.BlockModel) -> "PlaneRecord":
        mode, coded = encode_map(model.l2)
        return cls(mode, coded, model.nub_flags.copy())

    def bits(self) -> np.ndarray:
        return np.concatenate([
            [self.mode], int_to_bits(len(self.l2_coded), L2_LEN_BITS),
            self.l2_coded, self.nub_flags]).astype(np.uint8)

    def __len__(self) -> int:
        return 1 + L2_LEN_BITS + len(self.l2_coded) + len(self.nub_flags)


@dataclass(eq=False)
class GlobalRecord:
    header_bits: np.ndarray
    l1_mode: int
    l1_coded: np.ndarray

    @classmethod
    def build(cls, header_bits: np.ndarray, l1: np.ndarray) -> "GlobalRecord":
        mode, coded = encode_map(np.asarray(l1, dtype=np.uint8).ravel())
        return cls(np.asarray(header_bits, dtype=np.uint8).copy(), mode, coded)

    def bits(self) -> np.ndarray:
        return np.concatenate([
            self.header_bits, [self.l1_mode],
            int_to_bits(len(self.l1_coded), L1_LEN_BITS), self.l1_coded]).astype(np.uint8)

    def __len__(self) -> int:
        return HEADER_BITS + 1 + L1_LEN_BITS + len(self.l1_coded)

    def l1(self, shape: tuple[int, int]) -> np.ndarray:
        return decode_map(self.l1_mode, self.l1_coded, shape[0] * shape[1]).reshape(shape)


@dataclass(eq=False)
class AuxBundle:
    plane_flags: np.ndarray                  # 8 bits, index p-1
    records: dict[int, PlaneRecord]          # plane number (1-based) -> record
    global_record: GlobalRecord

    @property
    def first_plane(self) -> int:
        return min(self.records)

    def stream(self, plane: int) -> np.ndarray:
        bits = self.records[plane].bits()
        if plane == self.first_plane:
            bits = np.concatenate([bits, self.global_record.bits()])
        return bits

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AuxBundle):
            return NotImplemented
        return (np.array_equal(self.plane_flags, other.plane_flags)
                and self.records.keys() == other.records.keys()
                and all(np.array_equal(self.stream(p), other.stream(p)) for p in self.records))

    __hash__ = None  # type: ignore[assignment]


@dataclass
class PlaneLayout:
    plane: int
    n_nub: int
    n_ub: int
    n_embeddable_nub: int
    aux: np.ndarray       # flat raster indices, stream order
    payload: np.ndarray   # flat raster indices, embedding order

    @property
    def capacity(self) -> int:
        return len(self.payload)


@dataclass
class AuxLayout:
    shape: tuple[int, int]
    planes: dict[int, PlaneLayout] = field(default_factory=dict)

    @property
    def capacity(self) -> int:
        return sum(pl.capacity for pl in self.planes.values())

    def excluded_mask(self) -> np.ndarray:
        """(8, M, N) mask of cells never encrypted: aux cells and the header block."""
        m, n = self.shape
        mask = np.zeros((NPLANES, m * n), dtype=bool)
        mask[0, header_cells(self.shape)] = True
        for p, pl in self.planes.items():
            mask[p - 1, pl.aux] = True
        return mask.reshape(NPLANES, m, n)

    def payload_sequence(self) -> list[tuple[int, np.ndarray]]:
        return [(p, self.planes[p].payload) for p in sorted(self.planes)]


# -- addressing ---------------------------------------------------------------

def cell_addresses(shape: tuple[int, int]) -> np.ndarray:
    """(B, 16) flat raster index of every cell, blocks in scan order."""
    m, n = shape
    return blk.to_blocks(np.arange(m * n, dtype=np.int64).reshape(m, n))


def header_cells(shape: tuple[int, int]) -> np.ndarray:
    return cell_addresses(shape)[-1]


def backward_addresses(shape: tuple[int, int], reserved: bool) -> np.ndarray:
    """Aux address sequence of a plane: data cells from the plane tail backwards."""
    cells = cell_addresses(shape)
    if reserved:
        cells = cells[:-1]
    return cells[::-1, DATA_CELLS - 1::-1].ravel()


def _plane_layout(plane: int, shape: tuple[int, int], l2: np.ndarray,
                  nub_flags: np.ndarray, aux_len: int) -> PlaneLayout:
    reserved = plane == 1
    cells = cell_addresses(shape)
    if reserved:
        cells = cells[:-1]
    n_nub = int(np.asarray(l2).sum())
    n_ub = len(cells) - n_nub
    if DATA_CELLS * n_ub < aux_len:
        raise LayoutMismatch(f"plane {plane}: {aux_len} aux bits exceed UB room")
    nub_cells = cells[:n_nub][np.asarray(nub_flags) == 0][:, blk.P_CELLS].ravel()
    ub_cells = cells[n_nub:, :DATA_CELLS].ravel()
    aux = ub_cells[::-1][:aux_len] if aux_len else ub_cells[:0]
    payload = np.concatenate([nub_cells, ub_cells[:len(ub_cells) - aux_len]])
    return PlaneLayout(plane, n_nub, n_ub, int((np.asarray(nub_flags) == 0).sum()),
                       aux, payload)


def plan_layout(models: Sequence[blk.BlockModel],
                global_record: GlobalRecord) -> tuple[AuxBundle, AuxLayout]:
    """Choose embeddable planes and derive the full layout.

    ``models[p-1]`` is the block model of plane ``p`` (plane 1 with its
    header block reserved).
    """
    if len(models) != NPLANES:
        raise ValueError(f"expected {NPLANES} block models, got {len(models)}")
    shape = models[0].shape
    flags = np.zeros(NPLANES, dtype=np.uint8)
    records: dict[int, PlaneRecord] = {}
    layout = AuxLayout(shape)
    for p, model in enumerate(models, start=1):
        rec = PlaneRecord.from_model(model)
        if len(rec.l2_coded) >= 1 << L2_LEN_BITS:
            continue
        need = len(rec) + (0 if records else len(global_record))
        if DATA_CELLS * model.n_ub < need:
            continue
        flags[p - 1] = 1
        records[p] = rec
        layout.planes[p] = _plane_layout(p, shape, model.l2, model.nub_flags, need)
    if not records:
        raise CapacityError("no bit plane can hold its auxiliary data plus the global record")
    return AuxBundle(flags, records, global_record), layout


# -- writing and parsing --------------------------------------------------------

def header_block_bits(plane_flags: np.ndarray) -> np.ndarray:
    return np.concatenate([np.asarray(plane_flags, dtype=np.uint8),
                           int_to_bits(VERSION, 8)])


def write_aux(planes: np.ndarray, bundle: AuxBundle, layout: AuxLayout) -> np.ndarray:
    """Write the header block and every aux stream into a copy of ``planes``."""
    out = np.array(planes, dtype=np.uint8, copy=True)
    m, n = out.shape[1:]
    flat = out.reshape(NPLANES, m * n)
    if set(layout.planes) != set(bundle.records):
        raise LayoutMismatch("layout and bundle disagree on the embeddable planes")
    for p, pl in layout.planes.items():
        stream = bundle.stream(p)
        if len(stream) != len(pl.aux):
            raise LayoutMismatch(
                f"plane {p}: stream has {len(stream)} bits, layout reserves {len(pl.aux)}")
        flat[p - 1, pl.aux] = stream
    flat[0, header_cells((m, n))] = header_block_bits(bundle.plane_flags)
    return out


class _Reader:
    def __init__(self, values: np.ndarray, plane: int):
        self.values = values
        self.pos = 0
        self.plane = plane

    def take(self, count: int) -> np.ndarray:
        if count < 0 or self.pos + count > len(self.values):
            raise MalformedAux(f"plane {self.plane}: aux stream runs past the plane")
        out = self.values[self.pos:self.pos + count]
        self.pos += count
        return out

    def uint(self, width: int) -> int:
        return bits_to_int(self.take(width))


def parse_aux(planes: np.ndarray) -> tuple[AuxBundle, AuxLayout]:
    """Recover the aux bundle and layout from (marked, encrypted) planes."""
    planes = np.asarray(planes, dtype=np.uint8)
    if planes.ndim != 3 or planes.shape[0] != NPLANES:
        raise MalformedAux(f"expected (8, M, N) planes, got {planes.shape}")
    shape = planes.shape[1:]
    m, n = shape
    flat = planes.reshape(NPLANES, m * n)
    header = flat[0, header_cells(shape)]
    version = bits_to_int(header[8:])
    if version != VERSION:
        raise VersionMismatch(f"container version {version}, expected {VERSION}")
    flags = header[:8].copy()
    if not flags.any():
        raise MalformedAux("no plane is flagged as embeddable")
    records: dict[int, PlaneRecord] = {}
    layout = AuxLayout(shape)
    global_record = None
    for p in range(1, NPLANES + 1):
        if not flags[p - 1]:
            continue
        reserved = p == 1
        n_blocks = blk.classifiable(shape, reserved)
        reader = _Reader(flat[p - 1, backward_addresses(shape, reserved)], p)
        mode = int(reader.take(1)[0])
        l2_coded = reader.take(reader.uint(L2_LEN_BITS)).copy()
        l2 = decode_map(mode, l2_coded, n_blocks)
        nub_flags = reader.take(int(l2.sum())).copy()
        records[p] = PlaneRecord(mode, l2_coded, nub_flags)
        if global_record is None:
            header_bits = reader.take(HEADER_BITS).copy()
            l1_mode = int(reader.take(1)[0])
            l1_coded = reader.take(reader.uint(L1_LEN_BITS)).copy()
            if l1_mode == 1 and len(l1_coded) != m * n:
                raise MalformedAux(f"raw L1 has {len(l1_coded)} bits, expected {m * n}")
            global_record = GlobalRecord(header_bits, l1_mode, l1_coded)
        n_ub = n_blocks - int(l2.sum())
        if reader.pos > DATA_CELLS * n_ub:
            raise MalformedAux(f"plane {p}: aux data overlaps non-uniform blocks")
        layout.planes[p] = _plane_layout(p, shape, l2, nub_flags, reader.pos)
    return AuxBundle(flags, records, global_record), layout


def decode_l2(bundle: AuxBundle, plane: int, shape: tuple[int, int]) -> np.ndarray:
    rec = bundle.records[plane]
    return decode_map(rec.mode, rec.l2_coded, blk.classifiable(shape, plane == 1))

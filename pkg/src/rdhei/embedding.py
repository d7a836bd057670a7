"""Payload embedding, extraction and image recovery on bit planes.

The embedded stream is ``length(32 bits, big-endian) || body`` XORed with
the payload keystream, written into the layout's payload cells plane by
plane (ascending plane number).
"""

from __future__ import annotations

import numpy as np

from . import blocks as blk
from .crypto import LABEL_PAYLOAD, Key, encrypt_planes, keystream_bits
from .errors import CapacityExceeded, PrefixOutOfRange
from .prediction import NPLANES, planes_to_pe, reconstruct_image
from .wire import AuxLayout, bits_to_int, cell_addresses, decode_l2, int_to_bits, parse_aux

PREFIX_BITS = 32


def _payload_bits(payload: bytes | np.ndarray) -> np.ndarray:
    if isinstance(payload, (bytes, bytearray, memoryview)):
        return np.unpackbits(np.frombuffer(bytes(payload), dtype=np.uint8))
    bits = np.asarray(payload, dtype=np.uint8).ravel()
    if bits.size and bits.max() > 1:
        raise ValueError("bit payload must contain only 0 and 1")
    return bits


def max_payload_bits(layout: AuxLayout) -> int:
    return max(0, layout.capacity - PREFIX_BITS)


def embed(planes: np.ndarray, payload: bytes | np.ndarray, kd: Key | str | bytes,
          layout: AuxLayout | None = None) -> np.ndarray:
    """Hide ``payload`` (bytes or a 0/1 array) in encrypted planes.

    ``layout`` is recomputed from the planes when omitted; passing it only
    saves the parse.
    """
    planes = np.asarray(planes, dtype=np.uint8)
    if layout is None:
        _, layout = parse_aux(planes)
    body = _payload_bits(payload)
    if len(body) >= 1 << PREFIX_BITS:
        raise CapacityExceeded("payload length does not fit the 32-bit prefix")
    stream = np.concatenate([int_to_bits(len(body), PREFIX_BITS), body])
    if len(stream) > layout.capacity:
        raise CapacityExceeded(
            f"payload needs {len(body)} bits, capacity is {max_payload_bits(layout)}")
    stream ^= keystream_bits(kd, LABEL_PAYLOAD, len(stream))
    out = planes.copy()
    flat = out.reshape(NPLANES, -1)
    pos = 0
    for p, cells in layout.payload_sequence():
        chunk = stream[pos:pos + len(cells)]
        flat[p - 1, cells[:len(chunk)]] = chunk
        pos += len(chunk)
        if pos == len(stream):
            break
    return out


def _read_stream(planes: np.ndarray, layout: AuxLayout) -> np.ndarray:
    flat = np.asarray(planes, dtype=np.uint8).reshape(NPLANES, -1)
    parts = [flat[p - 1, cells] for p, cells in layout.payload_sequence()]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)


def extract_bits(planes: np.ndarray, kd: Key | str | bytes) -> np.ndarray:
    _, layout = parse_aux(planes)
    stream = _read_stream(planes, layout)
    if len(stream) < PREFIX_BITS:
        raise PrefixOutOfRange("capacity is smaller than the length prefix")
    stream = stream ^ keystream_bits(kd, LABEL_PAYLOAD, len(stream))
    length = bits_to_int(stream[:PREFIX_BITS])
    if length > len(stream) - PREFIX_BITS:
        raise PrefixOutOfRange(
            f"decoded length {length} exceeds capacity {len(stream) - PREFIX_BITS}"
            " (wrong data-hiding key or no payload)")
    return stream[PREFIX_BITS:PREFIX_BITS + length].copy()


def extract(planes: np.ndarray, kd: Key | str | bytes) -> bytes:
    """Recover the hidden payload as bytes (zero-padded to a whole byte)."""
    return np.packbits(extract_bits(planes, kd)).tobytes()


def restore_planes(planes: np.ndarray, ke: Key | str | bytes) -> tuple[np.ndarray, np.ndarray]:
    """Decrypt and undo reservation; returns the original PE planes and L1."""
    planes = np.asarray(planes, dtype=np.uint8)
    shape = planes.shape[1:]
    bundle, layout = parse_aux(planes)
    dec = encrypt_planes(planes, ke, layout.excluded_mask())
    for p, pl in layout.planes.items():
        reserved = p == 1
        n = blk.classifiable(shape, reserved)
        blocks = blk.to_blocks(dec[p - 1]).copy()
        nub = blocks[:pl.n_nub]
        ok = bundle.records[p].nub_flags == 0
        nub[ok] = blk.majority_restore(nub[ok])
        blocks[:pl.n_nub] = nub
        blocks[pl.n_nub:n] = blk.broadcast_restore(blocks[pl.n_nub:n])
        plane = blk.from_blocks(blocks, shape)
        dec[p - 1] = blk.inverse_rearrange(plane, decode_l2(bundle, p, shape), reserved)
    flat = dec.reshape(NPLANES, -1)
    flat[0, cell_addresses(shape)[-1]] = bundle.global_record.header_bits
    return dec, bundle.global_record.l1(shape).astype(bool)


def recover(planes: np.ndarray, ke: Key | str | bytes) -> np.ndarray:
    """Reconstruct the original image from marked (or merely encrypted) planes."""
    pe_planes, l1 = restore_planes(planes, ke)
    return reconstruct_image(planes_to_pe(pe_planes, l1))

"""End-to-end flows for the three parties.

* content owner: :func:`reserve_and_encrypt` (needs the encryption key)
* data hider: :func:`embed_image` / :func:`extract_image` (data-hiding key)
* receiver: :func:`extract_image`, :func:`recover_image` or both

Images travel between parties as ordinary 8-bit grayscale arrays; every
party rebuilds the layout from the image itself.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import blocks as blk
from . import embedding
from .analysis import CapacityReport, capacity_report, mse
from .crypto import Key, encrypt_planes
from .prediction import (NPLANES, PeImage, bytes_to_planes, compute_pe, pe_to_planes,
                         planes_to_bytes)
from .raster_io import check_image
from .wire import AuxBundle, AuxLayout, GlobalRecord, header_cells, plan_layout, write_aux


@dataclass
class Reservation:
    """Plaintext result of room reservation, before encryption."""

    pe: PeImage
    models: list[blk.BlockModel]
    bundle: AuxBundle
    layout: AuxLayout
    planes: np.ndarray          # rearranged planes with aux written
    report: CapacityReport


@dataclass
class ReservationResult:
    encrypted_planes: np.ndarray
    bundle: AuxBundle
    layout: AuxLayout
    report: CapacityReport

    @property
    def encrypted(self) -> np.ndarray:
        return planes_to_bytes(self.encrypted_planes)


def plan_reservation(image: np.ndarray) -> Reservation:
    pe = compute_pe(check_image(image))
    planes = pe_to_planes(pe)
    shape = pe.shape
    models = [blk.classify_blocks(planes[p], reserved=p == 0) for p in range(NPLANES)]
    header = planes[0].reshape(-1)[header_cells(shape)]
    glob = GlobalRecord.build(header, pe.overflow)
    bundle, layout = plan_layout(models, glob)
    arranged = planes.copy()
    for p in layout.planes:
        arranged[p - 1] = blk.rearrange(planes[p - 1], models[p - 1])
    written = write_aux(arranged, bundle, layout)
    return Reservation(pe, models, bundle, layout, written,
                       capacity_report(models, layout, pe))


def reserve_and_encrypt(image: np.ndarray, ke: Key | str | bytes) -> ReservationResult:
    res = plan_reservation(image)
    enc = encrypt_planes(res.planes, ke, res.layout.excluded_mask())
    return ReservationResult(enc, res.bundle, res.layout, res.report)


def embed_image(encrypted: np.ndarray, payload: bytes | np.ndarray,
                kd: Key | str | bytes) -> np.ndarray:
    planes = bytes_to_planes(check_image(encrypted))
    return planes_to_bytes(embedding.embed(planes, payload, kd))


def extract_image(marked: np.ndarray, kd: Key | str | bytes) -> bytes:
    return embedding.extract(bytes_to_planes(check_image(marked)), kd)


def extract_image_bits(marked: np.ndarray, kd: Key | str | bytes) -> np.ndarray:
    return embedding.extract_bits(bytes_to_planes(check_image(marked)), kd)


def recover_image(marked: np.ndarray, ke: Key | str | bytes) -> np.ndarray:
    return embedding.recover(bytes_to_planes(check_image(marked)), ke)


def payload_capacity(encrypted: np.ndarray) -> int:
    """Largest payload, in bits, the data hider can embed into ``encrypted``."""
    from .wire import parse_aux

    _, layout = parse_aux(bytes_to_planes(check_image(encrypted)))
    return embedding.max_payload_bits(layout)


class CycleFailure(AssertionError):
    pass


@dataclass
class CycleReport:
    er: float
    payload_bits: int
    mse: float
    report: CapacityReport
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def total_time(self) -> float:
        return sum(self.timings.values())


def full_cycle_check(image: np.ndarray, ke: Key | str | bytes, kd: Key | str | bytes,
                     payload: bytes | np.ndarray | None = None) -> CycleReport:
    """Reserve, encrypt, embed, extract and recover; fail loudly on any mismatch.

    ``payload=None`` embeds a maximal pseudo-random bit payload.
    """
    image = check_image(image)
    t = {}
    t0 = time.perf_counter()
    res = reserve_and_encrypt(image, ke)
    encrypted = res.encrypted
    t["reserve_encrypt"] = time.perf_counter() - t0
    if payload is None:
        nbits = embedding.max_payload_bits(res.layout)
        payload = np.random.default_rng(nbits).integers(0, 2, nbits, dtype=np.uint8)
    bits = embedding._payload_bits(payload)

    t0 = time.perf_counter()
    marked = embed_image(encrypted, payload, kd)
    t["embed"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    got = extract_image_bits(marked, kd)
    t["extract"] = time.perf_counter() - t0
    if not np.array_equal(got, bits):
        raise CycleFailure("extracted payload differs from the embedded one")

    t0 = time.perf_counter()
    recovered = recover_image(marked, ke)
    t["recover"] = time.perf_counter() - t0
    err = mse(image, recovered)
    if err != 0 or not np.array_equal(image, recovered):
        raise CycleFailure(f"recovered image differs from the original (MSE {err})")
    return CycleReport(len(bits) / image.size, len(bits), err, res.report, t)

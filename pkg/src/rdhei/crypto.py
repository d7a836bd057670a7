"""Keyed keystreams and XOR encryption.

Keystream construction (frozen, container version 1): the 32-byte user key is
bound to its role by ``subkey = SHA-256(label || key)`` with label
``b"RDHEI-H"`` (image matrix) or ``b"RDHEI-P"`` (payload). The keystream is
ChaCha20 under ``subkey`` with an all-zero 16-byte counter/nonce block, i.e.
the encryption of zero bytes. The image matrix takes the first ``M*N`` bytes
row-major, each byte sliced MSB-first into the eight key planes.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

from .errors import KeyFormatError
from .prediction import bytes_to_planes

LABEL_IMAGE = b"RDHEI-H"
LABEL_PAYLOAD = b"RDHEI-P"


@dataclass(frozen=True)
class Key:
    """A 256-bit key. Build from hex with :meth:`from_hex`."""

    material: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.material, (bytes, bytearray)) or len(self.material) != 32:
            raise KeyFormatError("key material must be exactly 32 bytes")

    @classmethod
    def from_hex(cls, text: str) -> "Key":
        text = text.strip()
        if len(text) != 64:
            raise KeyFormatError(f"key must be 64 hex characters, got {len(text)}")
        try:
            return cls(bytes.fromhex(text))
        except ValueError:
            raise KeyFormatError("key is not valid hexadecimal") from None

    @classmethod
    def generate(cls) -> "Key":
        return cls(os.urandom(32))

    def hex(self) -> str:
        return self.material.hex()

    def __repr__(self) -> str:
        return "Key(<redacted>)"


def as_key(key: Key | str | bytes) -> Key:
    if isinstance(key, Key):
        return key
    if isinstance(key, str):
        return Key.from_hex(key)
    return Key(bytes(key))


def keystream(key: Key | str | bytes, label: bytes, nbytes: int) -> bytes:
    subkey = hashlib.sha256(label + as_key(key).material).digest()
    enc = Cipher(algorithms.ChaCha20(subkey, bytes(16)), mode=None).encryptor()
    return enc.update(bytes(nbytes))


def keystream_bits(key: Key | str | bytes, label: bytes, nbits: int) -> np.ndarray:
    raw = np.frombuffer(keystream(key, label, (nbits + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw)[:nbits]


def key_matrix(key: Key | str | bytes, m: int, n: int) -> np.ndarray:
    """The pseudo-random (M, N) uint8 matrix H."""
    return np.frombuffer(keystream(key, LABEL_IMAGE, m * n), dtype=np.uint8).reshape(m, n)


def keystream_planes(key: Key | str | bytes, m: int, n: int) -> np.ndarray:
    return bytes_to_planes(key_matrix(key, m, n))


def encrypt_planes(planes: np.ndarray, key: Key | str | bytes,
                   excluded: np.ndarray | None = None) -> np.ndarray:
    """XOR ``planes`` with the key planes everywhere except ``excluded``.

    ``excluded`` is a boolean (8, M, N) mask; the operation is an involution.
    """
    planes = np.asarray(planes, dtype=np.uint8)
    h = keystream_planes(key, planes.shape[1], planes.shape[2])
    if excluded is not None:
        h = np.where(excluded, 0, h).astype(np.uint8)
    return planes ^ h


def cipher_payload(data: bytes, key: Key | str | bytes) -> bytes:
    stream = keystream(key, LABEL_PAYLOAD, len(data))
    return (np.frombuffer(data, dtype=np.uint8)
            ^ np.frombuffer(stream, dtype=np.uint8)).tobytes()


def standard_encrypt(image: np.ndarray, key: Key | str | bytes) -> np.ndarray:
    """Plain full-image XOR encryption, the baseline for security comparisons."""
    image = np.asarray(image, dtype=np.uint8)
    return image ^ key_matrix(key, *image.shape)

import hashlib
import struct

import numpy as np
import pytest

from rdhei.crypto import (LABEL_IMAGE, LABEL_PAYLOAD, Key, cipher_payload, encrypt_planes,
                          keystream, keystream_planes)
from rdhei.errors import KeyFormatError

GOLDEN_KEY = bytes(range(32))
GOLDEN_H = bytes.fromhex(
    "9448f67ce1fd03405f78123a88aebcfebfaeb342d3784a38d9d3739ad00b476c"
    "e55010c01bba4a654afab6fef84ba370bc6639b84f69e5e4478598c029403e4d")
GOLDEN_P = bytes.fromhex(
    "d1b0a526142c1b0a1bd0ed61ea2e7547b177155d60136a81a4e6ed2c0416a515"
    "e411adaf71aa0dd12d868105553ed0c6498ff3766645d73075d6baa1bbd2c774")


def _rotl(v, c):
    return ((v << c) & 0xFFFFFFFF) | (v >> (32 - c))


def chacha20_block(key, counter, nonce):
    """RFC 8439 block function, written independently of the library."""
    state = [0x61707865, 0x3320646E, 0x79622D32, 0x6B206574]
    state += list(struct.unpack("<8L", key)) + [counter] + list(struct.unpack("<3L", nonce))
    w = state[:]

    def qr(a, b, c, d):
        w[a] = (w[a] + w[b]) & 0xFFFFFFFF; w[d] = _rotl(w[d] ^ w[a], 16)
        w[c] = (w[c] + w[d]) & 0xFFFFFFFF; w[b] = _rotl(w[b] ^ w[c], 12)
        w[a] = (w[a] + w[b]) & 0xFFFFFFFF; w[d] = _rotl(w[d] ^ w[a], 8)
        w[c] = (w[c] + w[d]) & 0xFFFFFFFF; w[b] = _rotl(w[b] ^ w[c], 7)

    for _ in range(10):
        qr(0, 4, 8, 12); qr(1, 5, 9, 13); qr(2, 6, 10, 14); qr(3, 7, 11, 15)
        qr(0, 5, 10, 15); qr(1, 6, 11, 12); qr(2, 7, 8, 13); qr(3, 4, 9, 14)
    return struct.pack("<16L", *[(x + y) & 0xFFFFFFFF for x, y in zip(w, state)])


def test_chacha_oracle_matches_rfc_vector():
    # RFC 8439 section 2.3.2
    key = bytes(range(32))
    nonce = bytes.fromhex("000000090000004a00000000")
    out = chacha20_block(key, 1, nonce)
    assert out[:16].hex() == "10f1e7e4d13b5915500fdd1fa32071c4"


@pytest.mark.parametrize("label, golden", [(LABEL_IMAGE, GOLDEN_H), (LABEL_PAYLOAD, GOLDEN_P)])
def test_golden_keystream(label, golden):
    assert keystream(GOLDEN_KEY, label, 64) == golden
    subkey = hashlib.sha256(label + GOLDEN_KEY).digest()
    assert chacha20_block(subkey, 0, bytes(12)) == golden


def test_keystream_is_prefix_stable():
    long = keystream(GOLDEN_KEY, LABEL_IMAGE, 1000)
    assert long[:64] == GOLDEN_H
    assert keystream(GOLDEN_KEY, LABEL_IMAGE, 200) == long[:200]


def test_roles_are_separated():
    assert keystream(GOLDEN_KEY, LABEL_IMAGE, 32) != keystream(GOLDEN_KEY, LABEL_PAYLOAD, 32)


def test_same_key_same_planes():
    a = keystream_planes("11" * 32, 16, 16)
    assert np.array_equal(a, keystream_planes("11" * 32, 16, 16))


def test_distinct_keys_differ_in_half_the_bits():
    a = keystream_planes("11" * 32, 512, 512)
    b = keystream_planes("12" * 32, 512, 512)
    assert abs((a != b).mean() - 0.5) < 0.01


def test_plane_bit_frequency():
    h = keystream_planes("5e" * 32, 512, 512)
    freq = h.reshape(8, -1).mean(axis=1)
    assert ((freq > 0.49) & (freq < 0.51)).all()


def test_encrypt_is_involution_and_respects_exclusions(rng):
    planes = rng.integers(0, 2, (8, 16, 16), dtype=np.uint8)
    excluded = rng.random((8, 16, 16)) < 0.2
    enc = encrypt_planes(planes, "ab" * 32, excluded)
    assert np.array_equal(enc[excluded], planes[excluded])
    assert (enc[~excluded] != planes[~excluded]).mean() > 0.4
    assert np.array_equal(encrypt_planes(enc, "ab" * 32, excluded), planes)


def test_cipher_payload():
    assert cipher_payload(b"", "cd" * 32) == b""
    data = b"attack at dawn" * 10
    ct = cipher_payload(data, "cd" * 32)
    assert ct != data
    assert cipher_payload(ct, "cd" * 32) == data


def test_cipher_constant_payload_bit_frequency():
    ct = cipher_payload(bytes(100_000), "cd" * 32)
    assert abs(np.unpackbits(np.frombuffer(ct, np.uint8)).mean() - 0.5) < 0.01


@pytest.mark.parametrize("text", ["00" * 31, "zz" * 32, "0" * 65])
def test_bad_keys(text):
    with pytest.raises(KeyFormatError):
        Key.from_hex(text)


def test_key_repr_hides_material():
    assert "11" not in repr(Key.from_hex("11" * 32))

"""
Hiding data without the image key
=================================

The data hider only sees the encrypted image. The room map is in the
clear, so they can find the free cells, write a keyed payload, and anyone
holding the data-hiding key can read it back.
"""

from _common import KD, KE, lena
from rdhei.errors import PrefixOutOfRange
from rdhei.pipeline import (embed_image, extract_image, payload_capacity,
                            reserve_and_encrypt)

encrypted = reserve_and_encrypt(lena(), KE).encrypted

cap = payload_capacity(encrypted)
print(f"capacity: {cap} bits ({cap / encrypted.size:.3f} bpp)")

message = b"The quick brown fox jumps over the lazy dog. " * 200
marked = embed_image(encrypted, message, KD)
assert extract_image(marked, KD) == message
print(f"hid and recovered {len(message)} bytes")

# A wrong key decodes a garbage length prefix and is rejected.
try:
    extract_image(marked, "00" * 32)
except PrefixOutOfRange as exc:
    print(f"wrong key: {exc}")

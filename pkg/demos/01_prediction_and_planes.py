"""
Prediction errors and bit planes
================================

Neighbouring pixels are similar, so a median edge detector predicts each
pixel from its upper, left and upper-left neighbours and we keep only the
prediction error. Small errors mean the high bit planes of the error code
words are almost all zero, which is where the spare room comes from.
"""

import numpy as np

from _common import lena
from rdhei.analysis import entropy, pe_entropy
from rdhei.blocks import classify_blocks
from rdhei.prediction import compute_pe, pe_to_planes, planes_to_pe, reconstruct_image

img = lena()
pe = compute_pe(img)

# The error histogram is far more peaked than the pixel histogram.
print(f"pixel entropy: {entropy(np.bincount(img.ravel(), minlength=256)):.3f} bits")
print(f"PE entropy:    {pe_entropy(pe):.3f} bits")

# Errors beyond +-64 are stored raw and flagged in a per-pixel overflow map.
print(f"overflow pixels: {pe.overflow.sum()} ({100 * pe.overflow.mean():.3f}%)")

# Each pixel becomes an 8-bit code word (2|e| + sign), sliced MSB first.
planes = pe_to_planes(pe)
for k, plane in enumerate(planes, start=1):
    model = classify_blocks(plane, reserved=k == 1)
    print(f"plane {k}: {plane.mean():6.1%} ones, {model.n_ub:5d} uniform 4x4 blocks "
          f"of {model.l2.size}")

# Nothing is lost: planes + overflow map give the errors back, and the
# errors give the image back.
assert planes_to_pe(planes, pe.overflow) == pe
assert np.array_equal(reconstruct_image(pe), img)
print("planes -> errors -> image round trip is exact")

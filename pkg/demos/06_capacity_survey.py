"""
Capacity across images
======================

Smooth images give many uniform blocks and a high embedding rate;
textured ones give little. We measure a handful of photographs that ship
with scikit-image (an optional dependency, used only here) and write the
results as CSV.
"""

import sys

import numpy as np

from _common import lena
from rdhei.analysis import BenchRow, measure_er, write_csv

images = {"lena": lena()}
try:
    from skimage import color, data, transform

    for name in ("camera", "astronaut", "coffee", "brick", "grass"):
        arr = getattr(data, name)()
        if arr.ndim == 3:
            arr = color.rgb2gray(arr)
        arr = transform.resize(arr, (512, 512), anti_aliasing=True, preserve_range=arr.dtype != float)
        if arr.max() <= 1:
            arr = arr * 255
        images[name] = np.clip(np.round(arr), 0, 255).astype(np.uint8)
except ImportError:
    print("scikit-image not installed; measuring lena only", file=sys.stderr)

rows = [BenchRow(name, measure_er(img)) for name, img in images.items()]
write_csv(rows, sys.stdout)

"""Shared bits for the demos: the sample image and two fixed keys."""

from pathlib import Path

from rdhei.raster_io import load_pgm

LENA = Path(__file__).resolve().parents[1] / "tests" / "data" / "lena.pgm"
KE = "0f" * 32   # content owner's encryption key
KD = "a5" * 32   # data hider's key


def lena():
    return load_pgm(LENA)

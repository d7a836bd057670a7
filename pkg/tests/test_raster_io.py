import numpy as np
import pytest

from rdhei.errors import DimensionError, MalformedFormat, UnsupportedDepth
from rdhei.raster_io import iter_corpus, load_pgm, parse_pgm, pgm_bytes, store_pgm


def test_lena_dimensions(lena):
    assert lena.shape == (512, 512)
    assert lena.dtype == np.uint8


def test_constant_8x8(tmp_path):
    path = tmp_path / "zero.pgm"
    path.write_bytes(b"P5\n8 8\n255\n" + bytes(64))
    img = load_pgm(path)
    assert img.shape == (8, 8)
    assert not img.any()


def test_round_trip_is_exact(tmp_path, rng):
    img = rng.integers(0, 256, (16, 24), dtype=np.uint8)
    store_pgm(img, tmp_path / "a.pgm")
    assert np.array_equal(load_pgm(tmp_path / "a.pgm"), img)


def test_store_is_deterministic(tmp_path, rng):
    img = rng.integers(0, 256, (12, 8), dtype=np.uint8)
    store_pgm(img, tmp_path / "a.pgm")
    store_pgm(img, tmp_path / "b.pgm")
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()


def test_header_with_comment_is_read():
    data = b"P5\n# made by hand\n8 8\n# another\n255\n" + bytes(range(64))
    assert parse_pgm(data).ravel().tolist() == list(range(64))


def test_pil_reads_our_files(tmp_path, rng):
    Image = pytest.importorskip("PIL.Image")
    img = rng.integers(0, 256, (16, 8), dtype=np.uint8)
    store_pgm(img, tmp_path / "v.pgm")
    with Image.open(tmp_path / "v.pgm") as im:
        assert im.mode == "L"
        assert np.array_equal(np.asarray(im), img)


@pytest.mark.parametrize("data, exc", [
    (b"P2\n8 8\n255\n" + bytes(64), MalformedFormat),
    (b"P5\n8 8\n65535\n" + bytes(128), UnsupportedDepth),
    (b"P5\n10 8\n255\n" + bytes(80), DimensionError),
    (b"P5\n8 8\n255\n" + bytes(10), MalformedFormat),
    (b"P5\n8", MalformedFormat),
])
def test_rejects_bad_files(data, exc):
    with pytest.raises(exc):
        parse_pgm(data)


def test_pgm_bytes_header():
    assert pgm_bytes(np.zeros((8, 12), np.uint8)).startswith(b"P5\n12 8\n255\n")


def test_iter_corpus_sorted(tmp_path):
    for name in ["b.pgm", "a.pgm", "c.txt"]:
        (tmp_path / name).write_bytes(b"")
    assert [p.name for p in iter_corpus(tmp_path)] == ["a.pgm", "b.pgm"]

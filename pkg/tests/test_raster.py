import io
import struct
import zlib

import numpy as np
import pytest
from PIL import Image
from skimage.color import rgb2lab

from privshade.corpus import ChartSpec, generate
from privshade.errors import PngDecodeError, UnsupportedFormatError
from privshade.raster import (decode_png, encode_png, lab_to_rgb, lightness, pack_rgb,
                              rgb_to_lab, unpack_rgb)


def _pil_png(arr, mode, **kw):
    buf = io.BytesIO()
    Image.fromarray(arr, mode).save(buf, "PNG", **kw)
    return buf.getvalue()


def test_white_and_black_points():
    lab = rgb_to_lab(np.array([[[255, 255, 255], [0, 0, 0]]], np.uint8))
    assert lab[0, 0, 0] == pytest.approx(100.0, abs=1e-9)
    assert abs(lab[0, 0, 1]) < 0.01 and abs(lab[0, 0, 2]) < 0.01
    assert lab[0, 1, 0] == pytest.approx(0.0, abs=1e-9)


def test_red_matches_reference():
    lab = rgb_to_lab(np.array([[[255, 0, 0]]], np.uint8))[0, 0]
    np.testing.assert_allclose(lab, [53.24, 80.09, 67.20], atol=0.1)


def test_agrees_with_skimage(rng):
    img = rng.integers(0, 256, (64, 64, 3), dtype=np.uint8)
    np.testing.assert_allclose(rgb_to_lab(img), rgb2lab(img), atol=5e-3)


def test_lab_to_rgb_extremes():
    out = lab_to_rgb(np.array([[[100.0, 0, 0], [0.0, 0, 0]]]))
    assert out.tolist() == [[[255, 255, 255], [0, 0, 0]]]


def test_low_lightness_red_is_clamped():
    out, clamped = lab_to_rgb(np.array([[[25.0, 80.09, 67.20]]]), return_clamped=True)
    assert clamped > 0
    assert out.dtype == np.uint8


@pytest.mark.slow
def test_round_trip_every_color():
    keys = np.arange(1 << 24, dtype=np.uint32)
    worst = 0
    for chunk in np.array_split(keys, 16):
        rgb = unpack_rgb(chunk)[None]
        back = lab_to_rgb(rgb_to_lab(rgb))
        worst = max(worst, int(np.abs(back.astype(int) - rgb).max()))
    assert worst <= 1


def test_pack_unpack(rng):
    img = rng.integers(0, 256, (7, 5, 3), dtype=np.uint8)
    assert np.array_equal(unpack_rgb(pack_rgb(img)), img)


def test_conversion_commutes_with_permutation(rng):
    img = rng.integers(0, 256, (1, 500, 3), dtype=np.uint8)
    perm = rng.permutation(500)
    np.testing.assert_array_equal(rgb_to_lab(img)[:, perm], rgb_to_lab(img[:, perm]))


def test_lightness_strictly_increases_with_gray():
    g = np.arange(256, dtype=np.uint8)
    L = lightness(np.repeat(g[None, :, None], 3, axis=2))[0]
    assert np.all(np.diff(L) > 0)


class TestPng:
    def test_white_pixel(self):
        data = _pil_png(np.full((1, 1, 3), 255, np.uint8), "RGB")
        assert decode_png(data).tolist() == [[[255, 255, 255]]]

    def test_transparent_composites_to_white(self):
        data = _pil_png(np.zeros((1, 1, 4), np.uint8), "RGBA")
        assert decode_png(data).tolist() == [[[255, 255, 255]]]

    def test_half_alpha_composite(self):
        data = _pil_png(np.array([[[0, 0, 0, 128]]], np.uint8), "RGBA")
        assert decode_png(data).tolist() == [[[127, 127, 127]]]

    def test_gray_expands(self):
        data = _pil_png(np.array([[0, 77]], np.uint8), "L")
        assert decode_png(data).tolist() == [[[0, 0, 0], [77, 77, 77]]]

    def test_palette(self):
        img = Image.fromarray(np.array([[[10, 20, 30], [200, 100, 0]]], np.uint8)).quantize(2)
        buf = io.BytesIO()
        img.save(buf, "PNG")
        out = decode_png(buf.getvalue())
        assert sorted(map(tuple, out[0].tolist())) == [(10, 20, 30), (200, 100, 0)]

    def test_round_trip_and_determinism(self, rng):
        img = rng.integers(0, 256, (33, 17, 3), dtype=np.uint8)
        a, b = encode_png(img), encode_png(img)
        assert a == b
        assert np.array_equal(decode_png(a), img)

    def test_white_square(self):
        assert (decode_png(encode_png(np.full((100, 100, 3), 255, np.uint8))) == 255).all()

    def test_corpus_chart_round_trip(self):
        img, _ = generate(ChartSpec("bar", width=400, height=300), 3)
        assert np.array_equal(decode_png(encode_png(img)), img)
        tiny = img[40:42, 40:42].copy()
        assert np.array_equal(decode_png(encode_png(tiny)), tiny)

    def test_bad_signature_offset_zero(self):
        with pytest.raises(PngDecodeError) as exc:
            decode_png(b"GIF89a....")
        assert exc.value.offset == 0

    def test_crc_error_names_chunk_offset(self):
        data = bytearray(_pil_png(np.zeros((4, 4, 3), np.uint8), "RGB"))
        data[8 + 8 + 3] ^= 0xFF          # corrupt an IHDR data byte
        with pytest.raises(PngDecodeError) as exc:
            decode_png(bytes(data))
        assert exc.value.offset == 8
        assert exc.value.to_dict()["offset"] == 8

    def test_truncated(self):
        data = _pil_png(np.zeros((4, 4, 3), np.uint8), "RGB")
        with pytest.raises(PngDecodeError) as exc:
            decode_png(data[:40])
        assert exc.value.offset >= 8

    def test_sixteen_bit_rejected(self):
        raw = b"".join(b"\x00" + b"\x12\x34" * 3 for _ in range(2))
        def chunk(t, d):
            return struct.pack(">I", len(d)) + t + d + struct.pack(">I", zlib.crc32(t + d))
        data = (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", struct.pack(">IIBBBBB", 1, 2, 16, 2, 0, 0, 0))
                + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b""))
        with pytest.raises(UnsupportedFormatError):
            decode_png(data)

"""Raster images, PNG I/O and sRGB <-> CIELAB conversion.

Images are plain numpy arrays: ``(H, W, 3)`` ``uint8`` for RGB rasters and
``(H, W, 3)`` ``float64`` for Lab (L*, a*, b*) with a D65 white point.
"""
import io
import struct
import zlib

import numpy as np
from PIL import Image

from .errors import PngDecodeError, UnsupportedFormatError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_SUPPORTED_COLOR_TYPES = {0: "gray", 2: "rgb", 3: "palette", 4: "gray+alpha", 6: "rgba"}

# sRGB primaries -> XYZ (D65), http://www.brucelindbloom.com/Eqn_RGB_XYZ_Matrix.html
RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
XYZ_TO_RGB = np.linalg.inv(RGB_TO_XYZ)
# white point taken from the matrix so that RGB white lands exactly on a*=b*=0
WHITE_D65 = RGB_TO_XYZ.sum(axis=1)

_EPS = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0


def as_raster(img):
    """Validate and return ``img`` as a contiguous ``(H, W, 3)`` uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if arr.dtype != np.uint8:
        if np.any(arr < 0) or np.any(arr > 255):
            raise ValueError("channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def _scan_chunks(data):
    """Walk the chunk structure, returning the IHDR fields.

    Pillow reports most corruption without a position, so the container is
    checked here first to give errors a byte offset.
    """
    if len(data) < 8 or data[:8] != PNG_SIGNATURE:
        raise PngDecodeError("missing PNG signature", 0)
    pos = 8
    ihdr = None
    while True:
        if pos + 8 > len(data):
            raise PngDecodeError("truncated chunk header", pos)
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        end = pos + 12 + length
        if end > len(data):
            raise PngDecodeError(f"chunk {ctype!r} runs past end of data", pos)
        body = data[pos + 8:pos + 8 + length]
        (crc,) = struct.unpack(">I", data[pos + 8 + length:end])
        if zlib.crc32(ctype + body) & 0xFFFFFFFF != crc:
            raise PngDecodeError(f"CRC mismatch in chunk {ctype!r}", pos)
        if ihdr is None:
            if ctype != b"IHDR" or length != 13:
                raise PngDecodeError("first chunk is not a valid IHDR", pos)
            width, height, depth, color, _, _, interlace = struct.unpack(">IIBBBBB", body)
            ihdr = {"width": width, "height": height, "bit_depth": depth,
                    "color_type": color, "interlace": interlace}
        if ctype == b"IEND":
            return ihdr
        pos = end


def decode_png(data):
    """Decode 8-bit PNG bytes to an RGB array.

    Alpha is composited over opaque white and grayscale is expanded to RGB.
    """
    data = bytes(data)
    ihdr = _scan_chunks(data)
    # sub-byte palette indices still address 8-bit palette entries
    palette_ok = ihdr["color_type"] == 3 and ihdr["bit_depth"] in (1, 2, 4)
    if ihdr["bit_depth"] != 8 and not palette_ok:
        raise UnsupportedFormatError(f"unsupported bit depth {ihdr['bit_depth']} (only 8-bit PNG)")
    if ihdr["color_type"] not in _SUPPORTED_COLOR_TYPES:
        raise UnsupportedFormatError(f"unsupported PNG color type {ihdr['color_type']}")
    if ihdr["width"] < 1 or ihdr["height"] < 1:
        raise PngDecodeError("zero-sized image", 16)
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            rgba = np.asarray(im.convert("RGBA"), dtype=np.uint16)
    except (OSError, ValueError, SyntaxError, zlib.error) as exc:
        # container was valid, so the problem is inside the image data stream
        raise PngDecodeError(f"corrupt image data: {exc}", _first_idat_offset(data)) from exc
    alpha = rgba[..., 3:4]
    out = (rgba[..., :3] * alpha + 255 * (255 - alpha) + 127) // 255
    return out.astype(np.uint8)


def _first_idat_offset(data):
    pos = 8
    while pos + 8 <= len(data):
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        if ctype == b"IDAT":
            return pos
        pos += 12 + length
    return 8


def encode_png(img):
    """Encode an RGB array as PNG bytes.

    Compression settings are fixed and no metadata is written, so equal
    images always encode to identical bytes.
    """
    arr = as_raster(img)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG", compress_level=6, optimize=False)
    return buf.getvalue()


def read_png(path):
    with open(path, "rb") as fh:
        return decode_png(fh.read())


_SRGB_LUT = None


def srgb_to_linear(c):
    """sRGB transfer function inverse on values in [0, 1]."""
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(c):
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.0031308, 12.92 * c,
                    1.055 * np.power(np.maximum(c, 0.0031308), 1 / 2.4) - 0.055)


def _linear_lut():
    global _SRGB_LUT
    if _SRGB_LUT is None:
        _SRGB_LUT = srgb_to_linear(np.arange(256) / 255.0)
    return _SRGB_LUT


def _f(t):
    t = np.asarray(t, dtype=np.float64)
    out = np.cbrt(t)
    low = t <= _EPS
    if low.any():
        out[low] = (_KAPPA * t[low] + 16.0) / 116.0
    return out


def _f_inv(ft):
    return np.where(ft ** 3 > _EPS, ft ** 3, (116.0 * ft - 16.0) / _KAPPA)


def linear_rgb_to_lab(lin):
    xyz = lin @ RGB_TO_XYZ.T / WHITE_D65
    fx, fy, fz = _f(xyz[..., 0]), _f(xyz[..., 1]), _f(xyz[..., 2])
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def lab_to_linear_rgb(lab):
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = np.stack([_f_inv(fx), _f_inv(fy), _f_inv(fz)], axis=-1) * WHITE_D65
    return xyz @ XYZ_TO_RGB.T


def rgb_to_lab(img):
    """Convert 8-bit sRGB to CIELAB (D65)."""
    arr = np.asarray(img)
    if arr.dtype == np.uint8:
        lin = _linear_lut()[arr]
    else:
        lin = srgb_to_linear(arr / 255.0)
    return linear_rgb_to_lab(lin)


def lab_to_rgb(lab, return_clamped=False):
    """Convert CIELAB back to 8-bit sRGB.

    Out-of-gamut values are clipped channel by channel. With
    ``return_clamped=True`` the number of pixels that needed clipping is
    returned alongside the image.
    """
    srgb = linear_to_srgb(lab_to_linear_rgb(lab)) * 255.0
    # half-step slack: values that round into range are not clamp events
    clamped = np.any((srgb < -0.5) | (srgb > 255.5), axis=-1)
    out = np.clip(np.rint(srgb), 0, 255).astype(np.uint8)
    if return_clamped:
        return out, int(clamped.sum())
    return out


_Y_LUTS = None


def _y_luts():
    # Y is a weighted sum of linear channels, so each channel gets its own table
    global _Y_LUTS
    if _Y_LUTS is None:
        _Y_LUTS = [_linear_lut() * (RGB_TO_XYZ[1, k] / WHITE_D65[1]) for k in range(3)]
    return _Y_LUTS


def lightness(img):
    """L* channel of an RGB image."""
    arr = np.asarray(img)
    if arr.dtype == np.uint8:
        lr, lg, lb = _y_luts()
        y = lr[arr[..., 0]] + lg[arr[..., 1]] + lb[arr[..., 2]]
    else:
        y = srgb_to_linear(arr / 255.0) @ RGB_TO_XYZ[1] / WHITE_D65[1]
    return 116.0 * _f(y) - 16.0


def pack_rgb(img):
    """Pack RGB triples into single int32 keys (useful for grouping colors)."""
    arr = np.asarray(img, dtype=np.int32)
    return (arr[..., 0] << 16) | (arr[..., 1] << 8) | arr[..., 2]


def unpack_rgb(keys):
    keys = np.asarray(keys, dtype=np.int32)
    return np.stack([(keys >> 16) & 255, (keys >> 8) & 255, keys & 255], axis=-1).astype(np.uint8)

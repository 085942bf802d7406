# coding: utf-8

# # Pixels, PNG and CIELAB
#
# Everything in privshade works on plain `uint8` arrays of shape (H, W, 3).
# PNG files go in and out through a small codec, and color math happens in
# CIELAB under a D65 white.

import numpy as np

import privshade as ps
from _out import path

# A tiny gradient: black to white across, a red row at the bottom.

img = np.zeros((4, 6, 3), np.uint8)
img[:, :, :] = np.linspace(0, 255, 6).astype(np.uint8)[None, :, None]
img[3] = (220, 40, 40)

# Round trip through PNG bytes. The codec writes 8-bit RGB without any
# ancillary chunks, so equal pixels always give equal bytes.

data = ps.encode_png(img)
print(len(data), "bytes, round trip exact:", np.array_equal(ps.decode_png(data), img))
open(path("gradient.png"), "wb").write(data)

# L* runs 0 (black) to 100 (white). Grays have a* = b* = 0.

lab = ps.rgb_to_lab(img)
print(np.round(lab[0, :, 0], 2))
print("max |a*|, |b*| on the gray row:", np.abs(lab[0, :, 1:]).max().round(6))

# The red row has a real chroma.

print("red:", np.round(lab[3, 0], 2))

# `lightness` is the fast path when only L* is needed.

print(np.allclose(ps.lightness(img), lab[..., 0], atol=1e-9))

# Back to sRGB. Every 8-bit color survives the trip.

print(np.array_equal(ps.lab_to_rgb(lab), img))

# coding: utf-8

# # Contrast and frequency
#
# Kept pixels are moved to L* = 100 - c while hue stays put; chroma shrinks
# only when the color would leave the sRGB gamut. Masking pushes image energy
# away from DC, which the spectrum summary makes visible.

import numpy as np

import privshade as ps
from _out import path

img, _ = ps.generate(ps.ChartSpec("bar"), seed=0)

for c in (0, 25, 50, 75, 100):
    res = ps.transform(img, {"chartType": "bar", "contrast": c}, distances=())
    L = ps.lightness(res.image)[res.retained]
    print(f"c={c:3d}  kept L* in [{L.min():6.2f}, {L.max():6.2f}]  clamped {res.report.clamp_count}")

# Before and after for the default bar preset.

out, report = ps.transform(img, "bar")
print("non-DC energy: %.4f -> %.4f" % (report.non_dc_before, report.non_dc_after))
print("radial centroid: %.4f -> %.4f" % (report.centroid_before, report.centroid_after))

# The log-magnitude spectrum can be written out as an image.

from privshade.spectral import log_magnitude_image

spec = ps.magnitude_spectrum(out)
open(path("bar_spectrum.png"), "wb").write(ps.encode_png(log_magnitude_image(spec)))
open(path("bar_masked.png"), "wb").write(ps.encode_png(out))
print(ps.frequency_summary(out))

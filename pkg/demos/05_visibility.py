# coding: utf-8

# # Will anyone see it?
#
# The masking period n turns into a spatial frequency once a viewing distance
# and pixel density are fixed. A Mannos-Sakrison style contrast sensitivity
# curve then says whether the kept pattern clears threshold.

import privshade as ps

csf = ps.CsfModel()
for f in (0.5, 1, 2, 4, 8, 16):
    print(f"{f:5.1f} cpd  S = {csf.sensitivity(f):7.2f}")

# Margins above 1 mean the mark is predicted visible.

for name in ("bar", "scatter", "line", "pie", "pie-study1"):
    preset = ps.load_preset(name)
    row = []
    for d in (30, 60, 90):
        r = ps.predict_visibility(preset, ps.ViewingGeometry(d, 394.6))
        row.append(f"{d}cm {r.verdict:9s} {r.margin:6.3f}")
    print(f"{name:11s}", " | ".join(row))

# `simulate_view` blurs an image the way the model says a viewer would see it.

from _out import path

img, _ = ps.generate(ps.ChartSpec("bar"), seed=1)
out, _ = ps.transform(img, "bar", analyze=False)
for d in (30, 90):
    seen = ps.simulate_view(out, ps.ViewingGeometry(d, 394.6))
    open(path(f"bar_seen_{d}cm.png"), "wb").write(ps.encode_png(seen))
    print(d, "cm: spread of L* in the view", round(float(ps.lightness(seen).std()), 3))

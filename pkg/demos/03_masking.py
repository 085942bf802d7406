# coding: utf-8

# # Center-keep masks
#
# An n x n tile keeps its center pixel (area marks) or its center cross plus
# a 3x3 core (lines). Tiles are anchored at the image origin.

import numpy as np

import privshade as ps

print(ps.area_pattern(5).keep.astype(int))
print(ps.line_pattern(7).keep.astype(int))

# On a 10x10 square of area mark with n = 5, exactly four pixels survive.

from privshade.segment import AREA_MARK, MarkMap

labels = np.full((10, 10), AREA_MARK, np.uint8)
mm = MarkMap(labels, np.ones((10, 10), np.int32), [])
keep = ps.retained_mask(mm, ps.MaskPlan({"area_mark": ps.area_pattern(5)}))
print(np.argwhere(keep).tolist())

# Plans come from presets. `fine` masks lines with the cross pattern so the
# polyline stays connected; `coarse` uses the area pattern everywhere.

preset = ps.load_preset("line")
for g in ("fine", "coarse"):
    plan = ps.mask_plan(preset, g)
    print(g, {k: (v if isinstance(v, str) else f"{v.kind} n={v.n}") for k, v in plan.patterns.items()})

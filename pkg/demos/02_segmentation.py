# coding: utf-8

# # Finding the marks
#
# Before anything is masked, each pixel gets a role: background, area mark,
# area border, line mark or text. Foreground comes from a Li threshold on the
# distance to the background gray. Components are then sorted by how thick
# their strokes are.

import numpy as np

import privshade as ps
from privshade.segment import LABEL_NAMES, measure_stroke_width

img, truth = ps.generate(ps.ChartSpec("line"), seed=3)
marks, background, found_text = ps.segment(img)
print("background:", background, " heuristic text boxes:", len(found_text.boxes), found_text.source)

for name, count in marks.counts().items():
    print(f"{name:12s} {count:7d}")

# Stroke width is twice the median distance-to-edge along the skeleton, minus
# one. A 100x7 bar reads as 7.

bar = np.zeros((13, 106), bool)
bar[3:10, 3:103] = True
print("bar stroke:", measure_stroke_width(bar))

# The skeleton of that bar is a single horizontal run.

sk = ps.skeletonize(bar)
print("skeleton rows:", np.unique(np.nonzero(sk)[0]), "pixels:", int(sk.sum()))

# Text can be handed in as boxes instead of guessed. Boxes only claim
# foreground pixels, so whitespace inside a box stays background.

boxes = ps.TextAnnotation(list(truth.text_boxes))
with_boxes = ps.segment(img, text=boxes)[0]
print("text pixels, heuristic vs boxes:",
      marks.counts()["text"], with_boxes.counts()["text"])
print(LABEL_NAMES)

"""Synthetic bar, pie, scatter and line charts with pixel-exact ground truth.

Rendering is aliased and integer-based: the same spec and seed give the
same pixels everywhere. Marks use distinct hues at L* 50, axes and labels
are black, text comes from :mod:`privshade.font`.
"""
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import RangeError, UnknownChartTypeError
from .font import render_text
from .raster import encode_png, lab_to_rgb
from .segment import (AREA_BORDER, AREA_MARK, BACKGROUND, BORDER_THICKNESS, LABEL_NAMES,
                      LINE_MARK, TEXT, Box)

CHART_TYPES = ("bar", "pie", "scatter", "line")
INK = (0, 0, 0)
_HUES = (30, 250, 140, 330, 80, 200, 290, 0)


def mark_colors(k, lightness=50.0, chroma=28.0):
    """``k`` distinct in-gamut colors at fixed L* spread around the hue circle."""
    hues = np.radians([_HUES[i % len(_HUES)] + 7 * (i // len(_HUES)) for i in range(k)])
    lab = np.stack([np.full(k, lightness), chroma * np.cos(hues), chroma * np.sin(hues)], -1)
    rgb, clamped = lab_to_rgb(lab[None], return_clamped=True)
    assert clamped == 0
    return [tuple(int(v) for v in c) for c in rgb[0]]


@dataclass
class ChartSpec:
    chart_type: str
    width: int = 1080
    height: int = 1080
    values: list = None          # explicit data; drawn from the seed when None
    count: int = None            # number of bars / slices / dots / line points
    y_range: tuple = (0, 100)
    dot_radius: int = 6
    line_width: int = 3
    axis_width: int = 2
    font_scale: int = 2
    background: tuple = (255, 255, 255)
    title: str = None

    def __post_init__(self):
        if self.chart_type not in CHART_TYPES:
            raise UnknownChartTypeError(self.chart_type, CHART_TYPES)


_DEFAULT_COUNT = {"bar": 5, "pie": 4, "scatter": 24, "line": 8}


@dataclass
class GroundTruth:
    labels: np.ndarray
    component_ids: np.ndarray
    components: list = field(default_factory=list)   # dicts
    text_boxes: list = field(default_factory=list)   # Box
    background: tuple = (255, 255, 255)
    data: dict = field(default_factory=dict)

    @property
    def foreground(self):
        return self.labels != BACKGROUND

    def components_of(self, kind):
        return [c for c in self.components if c["kind"] == kind]

    def pixels_of(self, comp_id):
        return self.component_ids == comp_id

    def to_dict(self):
        return {
            "background": list(self.background),
            "text_boxes": [b.to_dict() for b in self.text_boxes],
            "components": self.components,
            "data": self.data,
            "label_names": list(LABEL_NAMES),
        }

    def label_png(self):
        """Label image as PNG; gray level = label index * 60."""
        g = (self.labels.astype(np.uint16) * 60).clip(0, 255).astype(np.uint8)
        return encode_png(np.repeat(g[..., None], 3, axis=2))


class _Canvas:
    def __init__(self, spec):
        self.spec = spec
        h, w = spec.height, spec.width
        self.img = np.empty((h, w, 3), dtype=np.uint8)
        self.img[:] = spec.background
        self.labels = np.zeros((h, w), dtype=np.uint8)
        self.ids = np.zeros((h, w), dtype=np.int32)
        self.components = []
        self.text_boxes = []

    def add(self, pix, color, label, kind, stroke):
        """Paint boolean ``pix`` as one ground-truth component."""
        if not pix.any():
            return None
        if (self.labels[pix] != BACKGROUND).any():
            raise RangeError(f"{kind} overlaps an existing mark")
        cid = len(self.components) + 1
        self.img[pix] = color
        self.ids[pix] = cid
        if label == AREA_MARK:
            core = ndimage.binary_erosion(np.pad(pix, 1), np.ones((3, 3), bool),
                                          iterations=BORDER_THICKNESS, border_value=0)[1:-1, 1:-1]
            self.labels[pix] = AREA_BORDER
            self.labels[core] = AREA_MARK
        else:
            self.labels[pix] = label
        ys, xs = np.nonzero(pix)
        x0, y0 = int(xs.min()), int(ys.min())
        self.components.append({
            "id": cid, "kind": kind, "label": LABEL_NAMES[label],
            "bbox": [x0, y0, int(xs.max()) - x0 + 1, int(ys.max()) - y0 + 1],
            "pixel_count": int(pix.sum()), "stroke_width": stroke,
        })
        return cid

    def rect(self, x0, y0, x1, y1):
        pix = np.zeros(self.labels.shape, dtype=bool)
        pix[max(y0, 0):max(y1, 0), max(x0, 0):max(x1, 0)] = True
        return pix

    def text(self, s, x, y, anchor="left"):
        """Render ``s`` with its top edge at ``y``; ``anchor`` sets x alignment."""
        scale = self.spec.font_scale
        ink = render_text(s, scale)
        h, w = ink.shape
        if anchor == "center":
            x -= w // 2
        elif anchor == "right":
            x -= w
        H, W = self.labels.shape
        if x < 0 or y < 0 or x + w > W or y + h > H:
            raise RangeError(f"label {s!r} does not fit on the canvas")
        pix = np.zeros((H, W), dtype=bool)
        pix[y:y + h, x:x + w] = ink
        self.add(pix, INK, TEXT, "text", float(scale))
        ys, xs = np.nonzero(pix)
        self.text_boxes.append(Box(int(xs.min()), int(ys.min()),
                                   int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1)))


class _Layout:
    def __init__(self, spec):
        w, h = spec.width, spec.height
        self.left = int(round(0.14 * w))
        self.right = w - int(round(0.05 * w))
        self.top = int(round(0.10 * h))
        self.bottom = h - int(round(0.12 * h))   # first row of the x axis

    def y_of(self, v, lo, hi):
        frac = (v - lo) / (hi - lo)
        return self.bottom - int(round(frac * (self.bottom - self.top)))


def _draw_axes(cv, lay, lo, hi, n_ticks=5):
    aw = cv.spec.axis_width
    scale = cv.spec.font_scale
    pix = cv.rect(lay.left - aw, lay.bottom, lay.right, lay.bottom + aw)
    pix |= cv.rect(lay.left - aw, lay.top, lay.left, lay.bottom + aw)
    ticks = []
    for i in range(n_ticks):
        v = lo + (hi - lo) * i / (n_ticks - 1)
        y = lay.y_of(v, lo, hi)
        pix |= cv.rect(lay.left - aw - 4 * scale, y - aw // 2, lay.left - aw, y - aw // 2 + aw)
        ticks.append((v, y))
    cv.add(pix, INK, LINE_MARK, "axis", float(aw))
    for v, y in ticks:
        label = f"{v:g}"
        cv.text(label, lay.left - aw - 7 * scale, y - 7 * scale // 2, anchor="right")


def _check_range(values, lo, hi, what):
    for v in values:
        if not (lo < v <= hi):
            raise RangeError(f"{what} value {v} outside plot range ({lo}, {hi}]")


def _bar(cv, spec, rng, n):
    lo, hi = spec.y_range
    vals = list(spec.values) if spec.values is not None else \
        [int(v) for v in rng.integers(lo + 0.15 * (hi - lo), hi - 0.05 * (hi - lo), n, endpoint=True)]
    _check_range(vals, lo, hi, "bar")
    lay = _Layout(spec)
    slot = (lay.right - lay.left) / len(vals)
    colors = mark_colors(len(vals))
    for i, v in enumerate(vals):
        cx = lay.left + slot * (i + 0.5)
        half = int(slot * 0.3)
        x0, x1 = int(round(cx)) - half, int(round(cx)) + half
        top = lay.y_of(v, lo, hi)
        cv.add(cv.rect(x0, top, x1, lay.bottom), colors[i], AREA_MARK, "bar",
               float(min(x1 - x0, lay.bottom - top)))
        cv.text(_category(i), int(round(cx)), lay.bottom + spec.axis_width + 5 * spec.font_scale,
                anchor="center")
    _draw_axes(cv, lay, lo, hi)
    return {"values": vals}


def _category(i):
    return chr(ord("A") + i % 26) + ("" if i < 26 else str(i // 26))


def _scatter(cv, spec, rng, n):
    lo, hi = spec.y_range
    lay = _Layout(spec)
    r = spec.dot_radius
    pad = r + 4
    if spec.values is not None:
        pts = [tuple(p) for p in spec.values]
        for x, y in pts:
            _check_range([x, y], lo, hi, "scatter")
        span_x = lay.right - lay.left - 2 * pad
        span_y = lay.bottom - lay.top - 2 * pad
        centers = [(lay.left + pad + int(round((x - lo) / (hi - lo) * span_x)),
                    lay.bottom - pad - int(round((y - lo) / (hi - lo) * span_y))) for x, y in pts]
    else:
        centers = []
        tries = 0
        while len(centers) < n:
            tries += 1
            if tries > 100000:
                raise RangeError("could not place non-overlapping dots")
            cx = int(rng.integers(lay.left + pad, lay.right - pad))
            cy = int(rng.integers(lay.top + pad, lay.bottom - pad))
            if all((cx - a) ** 2 + (cy - b) ** 2 > (2 * r + 4) ** 2 for a, b in centers):
                centers.append((cx, cy))
        pts = [((cx - lay.left) / (lay.right - lay.left) * (hi - lo) + lo,
                (lay.bottom - cy) / (lay.bottom - lay.top) * (hi - lo) + lo) for cx, cy in centers]
    H, W = cv.labels.shape
    yy, xx = np.ogrid[:H, :W]
    colors = mark_colors(len(centers))
    for i, (cx, cy) in enumerate(centers):
        pix = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        cv.add(pix, colors[i], AREA_MARK, "dot", float(2 * r + 1))
    _draw_axes(cv, lay, lo, hi)
    return {"points": [[round(float(a), 3), round(float(b), 3)] for a, b in pts]}


def _bresenham(x0, y0, x1, y1):
    pts = []
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx, sy = (1 if x0 < x1 else -1), (1 if y0 < y1 else -1)
    err = dx + dy
    while True:
        pts.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return pts
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def _line(cv, spec, rng, n):
    lo, hi = spec.y_range
    vals = list(spec.values) if spec.values is not None else \
        [int(v) for v in rng.integers(lo + 0.1 * (hi - lo), hi - 0.05 * (hi - lo), n, endpoint=True)]
    _check_range(vals, lo, hi, "line")
    lay = _Layout(spec)
    slot = (lay.right - lay.left) / len(vals)
    half = spec.line_width // 2
    pts = [(int(round(lay.left + slot * (i + 0.5))),
            min(lay.y_of(v, lo, hi), lay.bottom - half - 4)) for i, v in enumerate(vals)]
    center = np.zeros(cv.labels.shape, dtype=bool)
    for (a, b), (c, d) in zip(pts[:-1], pts[1:]):
        for x, y in _bresenham(a, b, c, d):
            center[y, x] = True
    if len(pts) == 1:
        center[pts[0][1], pts[0][0]] = True
    pix = ndimage.binary_dilation(center, np.ones((spec.line_width,) * 2, bool))
    cv.add(pix, mark_colors(1)[0], LINE_MARK, "polyline", float(spec.line_width))
    for i, (x, _) in enumerate(pts):
        cv.text(_category(i), x, lay.bottom + spec.axis_width + 5 * spec.font_scale, anchor="center")
    _draw_axes(cv, lay, lo, hi)
    return {"values": vals}


def _pie(cv, spec, rng, n):
    vals = list(spec.values) if spec.values is not None else [int(v) for v in rng.integers(10, 41, n)]
    if any(v <= 0 for v in vals):
        raise RangeError("pie values must be positive")
    H, W = cv.labels.shape
    radius = int(0.3 * min(W, H))
    cx, cy = W // 2, H // 2 + int(0.03 * H)
    # doubled coordinates put the center on a pixel corner
    yy, xx = np.mgrid[:H, :W]
    px = 2 * xx + 1 - 2 * cx
    py = 2 * yy + 1 - 2 * cy
    disc = px.astype(np.int64) ** 2 + py.astype(np.int64) ** 2 <= (2 * radius) ** 2
    total = float(sum(vals))
    bounds, acc = [], 0.0
    for v in vals:
        bounds.append(acc / total)
        acc += v
    dirs = [(int(round(1e6 * math.sin(2 * math.pi * f))), int(round(-1e6 * math.cos(2 * math.pi * f))))
            for f in bounds]
    colors = mark_colors(len(vals))
    for i, v in enumerate(vals):
        if len(vals) == 1:
            pix = disc
        else:
            u, w = dirs[i], dirs[(i + 1) % len(vals)]
            span = v / total
            if span <= 0.5:
                pix = disc & (_cross(u, px, py) >= 0) & (_cross_rev(w, px, py) > 0)
            else:
                pix = disc & ~((_cross(w, px, py) >= 0) & (_cross_rev(u, px, py) > 0))
        cv.add(pix, colors[i], AREA_MARK, "slice", None)
        mid = 2 * math.pi * (bounds[i] + v / total / 2)
        lx = cx + int(round((radius + 40) * math.sin(mid)))
        ly = cy - int(round((radius + 40) * math.cos(mid))) - 7 * spec.font_scale // 2
        cv.text(_category(i), lx, ly, anchor="center")
    return {"values": vals}


def _cross(u, px, py):
    # u x p
    return u[0] * py.astype(np.int64) - u[1] * px.astype(np.int64)


def _cross_rev(v, px, py):
    # p x v
    return px.astype(np.int64) * v[1] - py.astype(np.int64) * v[0]


_DRAW = {"bar": _bar, "pie": _pie, "scatter": _scatter, "line": _line}


def generate(spec, seed=0):
    """Render ``spec``; returns ``(image, GroundTruth)``."""
    if isinstance(spec, str):
        spec = ChartSpec(spec)
    rng = np.random.default_rng(seed)
    cv = _Canvas(spec)
    n = spec.count or _DEFAULT_COUNT[spec.chart_type]
    data = _DRAW[spec.chart_type](cv, spec, rng, n)
    title = spec.title if spec.title is not None else f"{spec.chart_type} chart {seed}"
    if title:
        cv.text(title, spec.width // 2, int(0.03 * spec.height), anchor="center")
    gt = GroundTruth(cv.labels, cv.ids, cv.components, cv.text_boxes,
                     tuple(spec.background), {"chart_type": spec.chart_type, "seed": seed, **data})
    return cv.img, gt


def blurred(img):
    """3x3 box blur; an anti-aliased stand-in for robustness checks."""
    f = ndimage.uniform_filter(img.astype(np.float64), size=(3, 3, 1), mode="nearest")
    return np.rint(f).astype(np.uint8)


def corpus(types=CHART_TYPES, count=6, seed=42, **spec_kw):
    """Yield ``(name, image, ground_truth)`` for ``count`` charts of each type."""
    for t in types:
        for i in range(count):
            s = seed * 1000 + CHART_TYPES.index(t) * 100 + i
            img, gt = generate(ChartSpec(t, **spec_kw), s)
            yield f"{t}_{i:02d}", img, gt


def write_corpus(out_dir, types=CHART_TYPES, count=6, seed=42, **spec_kw):
    """Write PNG, ground-truth JSON and label PNG per chart; returns names."""
    os.makedirs(out_dir, exist_ok=True)
    names = []
    for name, img, gt in corpus(types, count, seed, **spec_kw):
        with open(os.path.join(out_dir, f"{name}.png"), "wb") as fh:
            fh.write(encode_png(img))
        with open(os.path.join(out_dir, f"{name}.truth.json"), "w") as fh:
            json.dump(gt.to_dict(), fh, indent=1, sort_keys=True)
        with open(os.path.join(out_dir, f"{name}.labels.png"), "wb") as fh:
            fh.write(gt.label_png())
        names.append(name)
    return names

"""Foreground extraction and mark classification.

Pipeline pieces: Li minimum cross-entropy thresholding, Zhang-Suen thinning,
skeleton-based stroke width, text localization, and the per-pixel
:class:`MarkMap` that tells the masker what kind of mark every pixel is.
"""
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.measure import label as _label_regions

from .config import DEFAULTS
from .errors import ConfigError, DegenerateHistogramError, UndefinedWidthError
from .raster import as_raster, lightness, pack_rgb

BACKGROUND, AREA_MARK, AREA_BORDER, LINE_MARK, TEXT = range(5)
LABEL_NAMES = ("background", "area_mark", "area_border", "line_mark", "text")
LABEL_IDS = {name: i for i, name in enumerate(LABEL_NAMES)}

_SEG = DEFAULTS["segmentation"]
LINE_WIDTH_MAX = float(_SEG["line_width_max"])      # stroke widths at or below are line marks
BORDER_THICKNESS = int(_SEG["border_thickness"])    # inner border of area marks, px
TEXT_MAX_AREA = int(_SEG["text_max_area"])          # largest single glyph component, px^2
TEXT_ALIGN_TOL = float(_SEG["text_align_tol"])      # vertical center tolerance, x box height
TEXT_GAP_FACTOR = 1.0    # largest horizontal gap inside a word run, x box height


# --------------------------------------------------------------------------
# thresholding

def gray_levels(img, light=None):
    """8-bit gray image from L*, so thresholding works in perceptual units.

    ``light`` is the image's L* when the caller already has it.
    """
    if light is None:
        light = lightness(as_raster(img))
    return np.rint(light * 2.55).clip(0, 255).astype(np.uint8)


def li_objective(hist):
    """Li-Lee cross-entropy for every candidate threshold ``t`` in 0..255.

    Class one is ``g < t``, class two ``g >= t``. The constant term
    ``sum g h(g) log g`` is dropped. Candidates leaving a class empty get
    ``inf``.
    """
    hist = np.asarray(hist, dtype=np.int64)
    if hist.shape != (256,):
        raise ValueError("histogram must have 256 bins")
    g = np.arange(256, dtype=np.int64)
    # integer moments: exact, so ties between equal partitions stay ties
    n_lo = np.concatenate([[0], np.cumsum(hist)[:-1]])
    m_lo = np.concatenate([[0], np.cumsum(g * hist)[:-1]])
    n_hi = hist.sum() - n_lo
    m_hi = int((g * hist).sum()) - m_lo
    out = np.full(256, np.inf)
    for t in range(256):
        out[t] = _li_value(int(n_lo[t]), int(m_lo[t]), int(n_hi[t]), int(m_hi[t]))
    return out


def _li_value(n1, m1, n2, m2):
    if n1 == 0 or n2 == 0:
        return np.inf
    val = 0.0
    if m1 > 0:
        val -= m1 * np.log(m1 / n1)
    if m2 > 0:
        val -= m2 * np.log(m2 / n2)
    return val


def li_threshold_from_histogram(hist):
    obj = li_objective(hist)
    if not np.isfinite(obj).any():
        raise DegenerateHistogramError("histogram has fewer than two distinct gray levels")
    return int(np.argmin(obj))


def li_threshold(gray):
    """Minimum cross-entropy threshold of an 8-bit gray image.

    Returns the smallest ``t`` minimizing the criterion; pixels ``< t`` form
    the dark class.
    """
    gray = np.asarray(gray)
    if gray.dtype != np.uint8:
        gray = np.clip(np.rint(gray), 0, 255).astype(np.uint8)
    hist = np.bincount(gray.ravel(), minlength=256)
    return li_threshold_from_histogram(hist)


def _frame_pixels(img):
    h, w = img.shape[:2]
    parts = [img[0], img[h - 1]]
    if h > 2:
        parts += [img[1:h - 1, 0], img[1:h - 1, w - 1]]
    return np.concatenate(parts, axis=0)


def estimate_background(img):
    """Most common color on the outer frame of the image, as an RGB tuple."""
    img = as_raster(img)
    keys = pack_rgb(_frame_pixels(img))
    vals, counts = np.unique(keys, return_counts=True)
    k = int(vals[np.argmax(counts)])
    return ((k >> 16) & 255, (k >> 8) & 255, k & 255)


def foreground_mask(img, background=None, light=None):
    """Boolean mask of mark pixels.

    Each pixel's gray level is measured as its distance from the background
    gray (modal frame color unless given), so the background sits at level 0
    and every mark, dark or light, lies on the far side. The Li threshold of
    that distance image separates the two; foreground is ``distance >= t``.
    Thresholding raw gray instead would let Li split black text from
    mid-tone marks on a sparse chart and drop the marks.
    """
    img = as_raster(img)
    gray = gray_levels(img, light).astype(np.int16)
    bg = estimate_background(img) if background is None else background
    bg_gray = int(gray_levels(np.array([[bg]], dtype=np.uint8))[0, 0])
    dist = np.abs(gray - bg_gray).astype(np.uint8)
    t = li_threshold(dist)
    return dist >= t


# --------------------------------------------------------------------------
# thinning

def _zhang_suen_luts():
    luts = np.zeros((2, 256), dtype=bool)
    for code in range(256):
        p = [(code >> k) & 1 for k in range(8)]   # P2..P9 clockwise from north
        b = sum(p)
        a = sum(1 for k in range(8) if p[k] == 0 and p[(k + 1) % 8] == 1)
        p2, p3, p4, p5, p6, p7, p8, p9 = p
        if not (2 <= b <= 6 and a == 1):
            continue
        luts[0, code] = p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0
        luts[1, code] = p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0
    return luts


_ZS_LUT = _zhang_suen_luts()
_BLOCK_TOP_LEFT = (1 << 2) | (1 << 3) | (1 << 4)   # E, SE, S set; nothing else


def skeletonize(mask):
    """Zhang-Suen parallel thinning.

    Only pixels with a background 4-neighbour can be removed, so each pass
    visits just the current contour. An isolated 2x2 block, which plain
    Zhang-Suen erases outright, keeps its top-left pixel.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    h, w = mask.shape
    if not mask.any():
        return mask.copy()
    pad = 2
    ww = w + 2 * pad
    img = np.pad(mask, pad).astype(np.uint8).ravel()
    nb = np.array([-ww, -ww + 1, 1, ww + 1, ww, ww - 1, -1, -ww - 1])
    ring = np.array([-ww + 2, 2, ww + 2, 2 * ww + 2, 2 * ww + 1, 2 * ww, 2 * ww - 1])
    weights = (1 << np.arange(8)).astype(np.int64)

    fg = np.flatnonzero(img)
    four = nb[[0, 2, 4, 6]]
    cand = fg[(img[fg[:, None] + four[None, :]] == 0).any(axis=1)]
    while True:
        changed = False
        for sub in (0, 1):
            if cand.size == 0:
                break
            code = (img[cand[:, None] + nb[None, :]].astype(np.int64) * weights).sum(axis=1)
            delete = _ZS_LUT[sub][code]
            corner = np.flatnonzero(delete & (code == _BLOCK_TOP_LEFT))
            if corner.size:
                lone = (img[cand[corner][:, None] + ring[None, :]] == 0).all(axis=1)
                delete[corner[lone]] = False
            gone = cand[delete]
            if gone.size == 0:
                continue
            changed = True
            img[gone] = 0
            touched = (gone[:, None] + nb[None, :]).ravel()
            touched = touched[img[touched] == 1]
            cand = np.unique(np.concatenate([cand[~delete], touched]))
        if not changed:
            break
    return img.reshape(h + 2 * pad, ww)[pad:-pad, pad:-pad].astype(bool)


def stroke_width(component, skeleton):
    """Stroke width of a pixel set from its skeleton.

    ``2 * median(EDT on skeleton) - 1`` where the EDT is the Euclidean
    distance from each pixel center to the nearest pixel outside the
    component. The ``- 1`` makes a one-pixel line measure exactly 1 and a
    solid ``w``-wide bar measure ``w`` (odd ``w``) or ``w + 1`` (even ``w``).
    """
    component = np.asarray(component, dtype=bool)
    skeleton = np.asarray(skeleton, dtype=bool) & component
    if not skeleton.any():
        raise UndefinedWidthError("component has an empty skeleton")
    edt = ndimage.distance_transform_edt(np.pad(component, 1))[1:-1, 1:-1]
    return float(2.0 * np.median(edt[skeleton]) - 1.0)


def measure_stroke_width(component):
    """Skeletonize ``component`` and return its stroke width."""
    component = np.asarray(component, dtype=bool)
    return stroke_width(component, skeletonize(component))


# --------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class Box:
    x: int
    y: int
    w: int
    h: int

    def to_dict(self):
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @property
    def slices(self):
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)


@dataclass
class TextAnnotation:
    boxes: list = field(default_factory=list)
    source: str = "external"

    def validate(self, shape):
        h, w = shape[:2]
        for b in self.boxes:
            if b.w < 1 or b.h < 1 or b.x < 0 or b.y < 0 or b.x + b.w > w or b.y + b.h > h:
                raise ConfigError(f"text box {b.to_dict()} lies outside the {w}x{h} image")

    def to_json(self):
        return json.dumps({"boxes": [b.to_dict() for b in self.boxes]})

    @classmethod
    def from_json(cls, text, source="external"):
        try:
            doc = json.loads(text)
            boxes = [Box(int(b["x"]), int(b["y"]), int(b["w"]), int(b["h"]))
                     for b in doc["boxes"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"malformed text annotation: {exc}") from exc
        return cls(boxes, source)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class MarkComponent:
    id: int
    label: int
    bbox: tuple          # (x, y, w, h)
    pixel_count: int
    stroke_width: float = None

    def to_dict(self):
        return {"id": self.id, "label": LABEL_NAMES[self.label], "bbox": list(self.bbox),
                "pixel_count": self.pixel_count, "stroke_width": self.stroke_width}


@dataclass
class MarkMap:
    """Per-pixel mark labels plus the components they came from.

    ``component_ids`` is 0 on background; border pixels share the id of the
    area component they belong to.
    """
    labels: np.ndarray
    component_ids: np.ndarray
    components: list

    @property
    def shape(self):
        return self.labels.shape

    def counts(self):
        c = np.bincount(self.labels.ravel(), minlength=len(LABEL_NAMES))
        return {name: int(c[i]) for i, name in enumerate(LABEL_NAMES)}

    def component(self, cid):
        return self.components[cid - 1]

    def restricted(self, keep):
        """Copy where pixels outside ``keep`` become background."""
        keep = np.asarray(keep, dtype=bool)
        return MarkMap(np.where(keep, self.labels, BACKGROUND).astype(np.uint8),
                       np.where(keep, self.component_ids, 0), list(self.components))


# --------------------------------------------------------------------------
# components and classification

def label_color_components(img, region):
    """8-connected components of ``region`` pixels sharing one exact color.

    Touching marks of different colors (adjacent pie slices, say) come out as
    separate components. Returns ``(ids, n)``.
    """
    keys = np.where(region, pack_rgb(img) + 1, 0)
    ids = _label_regions(keys, background=0, connectivity=2)
    return ids.astype(np.int32), int(ids.max())


def _crop(ids, sl, cid):
    comp = ids[sl] == cid
    return np.pad(comp, 1)


def _box_of(sl):
    return (sl[1].start, sl[0].start, sl[1].stop - sl[1].start, sl[0].stop - sl[0].start)


def detect_text_heuristic(img, fg, max_area=TEXT_MAX_AREA, max_stroke=LINE_WIDTH_MAX,
                          align_tol=TEXT_ALIGN_TOL, gap_factor=TEXT_GAP_FACTOR):
    """Find text as runs of small, thin, horizontally aligned components.

    Components under ``max_area`` pixels with stroke width at most
    ``max_stroke`` are glyph candidates. Two candidates join a run when their
    vertical centers differ by at most ``align_tol`` times the taller height
    and the horizontal gap is at most ``gap_factor`` times that height.
    """
    img = as_raster(img)
    fg = np.asarray(fg, dtype=bool)
    ids, n = label_color_components(img, fg)
    if n == 0:
        return TextAnnotation([], "heuristic")
    sizes = np.bincount(ids.ravel(), minlength=n + 1)
    boxes = []
    for cid, sl in enumerate(ndimage.find_objects(ids), start=1):
        if sl is None or sizes[cid] >= max_area:
            continue
        if measure_stroke_width(_crop(ids, sl, cid)) > max_stroke:
            continue
        boxes.append(_box_of(sl))
    if not boxes:
        return TextAnnotation([], "heuristic")
    b = np.array(boxes, dtype=np.float64)
    x0, y0, x1, y1 = b[:, 0], b[:, 1], b[:, 0] + b[:, 2], b[:, 1] + b[:, 3]
    cy = (y0 + y1) / 2
    hmax = np.maximum(b[:, 3][:, None], b[:, 3][None, :])
    gap = np.maximum(x0[:, None], x0[None, :]) - np.minimum(x1[:, None], x1[None, :])
    linked = (np.abs(cy[:, None] - cy[None, :]) <= align_tol * hmax) & (gap <= gap_factor * hmax)
    _, groups = _connected_groups(linked)
    out = []
    for g in range(groups.max() + 1):
        sel = groups == g
        gx0, gy0 = int(x0[sel].min()), int(y0[sel].min())
        out.append(Box(gx0, gy0, int(x1[sel].max()) - gx0, int(y1[sel].max()) - gy0))
    out.sort(key=lambda bx: (bx.y, bx.x))
    return TextAnnotation(out, "heuristic")


def _connected_groups(adj):
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components
    return connected_components(csr_matrix(adj), directed=False)


def classify_marks(img, fg, text=None, line_width=LINE_WIDTH_MAX, border=BORDER_THICKNESS,
                   threads=1):
    """Label every pixel as background, area mark, area border, line mark or text.

    Foreground inside a text box is text (boxes are intersected with the
    foreground; background inside a box stays background). Other foreground
    is split into same-color components; a component whose stroke width is
    at most ``line_width`` is a line mark, otherwise an area mark whose
    pixels within ``border`` (chessboard) of the outside become area border.
    """
    img = as_raster(img)
    fg = np.asarray(fg, dtype=bool)
    if fg.shape != img.shape[:2]:
        raise ValueError("foreground mask and image differ in size")
    h, w = fg.shape
    labels = np.zeros((h, w), dtype=np.uint8)
    comp_ids = np.zeros((h, w), dtype=np.int32)
    components = []

    text = text or TextAnnotation([], "heuristic")
    text.validate(fg.shape)
    for box in text.boxes:
        sl = box.slices
        pix = fg[sl] & (labels[sl] == BACKGROUND)
        if not pix.any():
            continue
        cid = len(components) + 1
        labels[sl][pix] = TEXT
        comp_ids[sl][pix] = cid
        width = measure_stroke_width(np.pad(pix, 1))
        components.append(MarkComponent(cid, TEXT, box_tuple(box), int(pix.sum()), width))

    ids, n = label_color_components(img, fg & (labels == BACKGROUND))
    offset = len(components)
    slices = ndimage.find_objects(ids)
    crops = [_crop(ids, sl, k) for k, sl in enumerate(slices, start=1)]
    if threads > 1 and len(crops) > 1:
        with ThreadPoolExecutor(threads) as pool:
            widths = list(pool.map(measure_stroke_width, crops))
    else:
        widths = [measure_stroke_width(c) for c in crops]
    struct = np.ones((3, 3), dtype=bool)
    for k, (sl, comp, width) in enumerate(zip(slices, crops, widths), start=1):
        cid = offset + k
        inner = comp[1:-1, 1:-1]
        if width <= line_width:
            kind = LINE_MARK
            labels[sl][inner] = LINE_MARK
        else:
            kind = AREA_MARK
            core = ndimage.binary_erosion(comp, struct, iterations=border, border_value=0)
            edge = (comp & ~core)[1:-1, 1:-1]
            labels[sl][inner] = AREA_MARK
            labels[sl][edge] = AREA_BORDER
        comp_ids[sl][inner] = cid
        components.append(MarkComponent(cid, kind, _box_of(sl), int(inner.sum()), width))
    return MarkMap(labels, comp_ids, components)


def box_tuple(box):
    return (box.x, box.y, box.w, box.h)


def segment(img, text=None, line_width=LINE_WIDTH_MAX, border=BORDER_THICKNESS, threads=1,
            light=None):
    """Foreground + (heuristic or given) text + classification in one call.

    Returns ``(markmap, background_rgb, text_annotation)``.
    """
    img = as_raster(img)
    bg = estimate_background(img)
    fg = foreground_mask(img, bg, light)
    if text is None:
        text = detect_text_heuristic(img, fg, max_stroke=line_width)
    return classify_marks(img, fg, text, line_width, border, threads), bg, text

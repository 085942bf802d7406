"""Tiled center-keep mask patterns and their application to labeled marks."""
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .config import text_mask_table
from .errors import IncompletePlanError, InvalidMaskSizeError, InvalidWidthError
from .raster import as_raster
from .segment import BACKGROUND, LABEL_IDS, LABEL_NAMES, TEXT

AREA_SIZES = (1, 3, 5, 7, 9, 11, 13)
LINE_SIZES = (1, 5, 9, 13, 17, 21, 25)
LINE_BLOCK = 3

# (stroke width upper bound, line mask size) rows for text
TEXT_MASK_TABLE = text_mask_table()


class MaskSizeWarning(UserWarning):
    """Mask size outside the range studied for that mask kind."""


@dataclass(frozen=True, eq=False)
class MaskPattern:
    n: int
    keep: np.ndarray     # (n, n) bool, indexed [y mod n, x mod n]
    kind: str

    def __eq__(self, other):
        return (isinstance(other, MaskPattern) and self.n == other.n
                and self.kind == other.kind and np.array_equal(self.keep, other.keep))

    def __hash__(self):
        return hash((self.n, self.kind, self.keep.tobytes()))

    @property
    def kept(self):
        return int(self.keep.sum())

    @property
    def retained_fraction(self):
        return self.kept / self.n ** 2

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


def _check_size(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1 or n % 2 == 0:
        raise InvalidMaskSizeError(f"mask size must be a positive odd integer, got {n!r}")
    return int(n)


def area_pattern(n):
    n = _check_size(n)
    keep = np.zeros((n, n), dtype=bool)
    keep[n // 2, n // 2] = True
    return MaskPattern(n, keep, "area")


def line_pattern(n):
    """Center k x k block (k = min(3, n)) plus the full center row and column.

    The cross guarantees any stroke longer than one tile crosses a kept
    pixel at least once per tile; the block keeps short strokes near the
    center oriented.
    """
    n = _check_size(n)
    keep = np.zeros((n, n), dtype=bool)
    c = n // 2
    k = min(LINE_BLOCK, n)
    keep[c - k // 2:c + k // 2 + 1, c - k // 2:c + k // 2 + 1] = True
    keep[c, :] = True
    keep[:, c] = True
    return MaskPattern(n, keep, "line")


def make_area_mask(n):
    """Area-based mask: only the center pixel of each n x n tile survives."""
    pattern = area_pattern(n)
    if pattern.n not in AREA_SIZES:
        warnings.warn(f"area mask size {n} outside studied sizes {AREA_SIZES}",
                      MaskSizeWarning, stacklevel=2)
    return pattern


def make_line_mask(n):
    pattern = line_pattern(n)
    if pattern.n not in LINE_SIZES:
        warnings.warn(f"line mask size {n} outside studied sizes {LINE_SIZES}",
                      MaskSizeWarning, stacklevel=2)
    return pattern


def pattern(kind, n):
    if kind == "area":
        return area_pattern(n)
    if kind == "line":
        return line_pattern(n)
    raise ValueError(f"unknown mask kind {kind!r}")


def text_mask_size(stroke_width, table=TEXT_MASK_TABLE):
    if stroke_width is None or not stroke_width >= 1:
        raise InvalidWidthError(f"stroke width must be >= 1, got {stroke_width!r}")
    for upper, n in table:
        if stroke_width <= upper:
            return n
    return table[-1][1]


def adaptive_text_mask(stroke_width, table=TEXT_MASK_TABLE):
    """Line mask sized from a text stroke width via the calibration table."""
    return line_pattern(text_mask_size(stroke_width, table))


ADAPTIVE = "adaptive"


@dataclass
class MaskPlan:
    """Which pattern each mark label gets. ``text`` may be ``"adaptive"``."""
    patterns: dict

    def to_dict(self):
        return {name: (p if p == ADAPTIVE else p.to_dict()) for name, p in self.patterns.items()}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc):
        pats = {}
        for name, spec in doc.items():
            if name not in LABEL_IDS or name == "background":
                raise ValueError(f"unknown mark label {name!r}")
            if spec == ADAPTIVE:
                if name != "text":
                    raise ValueError("only text may use adaptive masking")
                pats[name] = ADAPTIVE
            else:
                pats[name] = pattern(spec["kind"], spec["n"])
        return cls(pats)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def tile_keep(pattern, shape):
    """Keep-grid of ``pattern`` tiled from the origin over ``shape``."""
    h, w = shape
    n = pattern.n
    return np.tile(pattern.keep, (-(-h // n), -(-w // n)))[:h, :w]


def retained_mask(marks, plan, text_table=TEXT_MASK_TABLE):
    """Boolean map of mark pixels that survive masking under ``plan``."""
    labels = marks.labels
    keep = np.zeros(labels.shape, dtype=bool)
    present = np.unique(labels)
    for lab in present:
        if lab == BACKGROUND:
            continue
        name = LABEL_NAMES[lab]
        pat = plan.patterns.get(name)
        if pat is None:
            raise IncompletePlanError(f"mask plan has no pattern for {name!r}")
        sel = labels == lab
        if pat == ADAPTIVE:
            _keep_adaptive(marks, sel, keep, text_table)
        else:
            keep |= sel & tile_keep(pat, labels.shape)
    return keep


def _keep_adaptive(marks, sel, keep, table):
    by_size = {}
    for comp in marks.components:
        if comp.label == TEXT:
            n = text_mask_size(max(comp.stroke_width, 1.0), table)
            by_size.setdefault(n, []).append(comp.id)
    ids = marks.component_ids
    for n, cids in sorted(by_size.items()):
        region = sel & np.isin(ids, cids)
        keep |= region & tile_keep(line_pattern(n), ids.shape)


def apply_masking(img, marks, plan, bg, text_table=TEXT_MASK_TABLE):
    """Replace non-retained mark pixels with ``bg``; everything else is untouched."""
    img = as_raster(img)
    if marks.shape != img.shape[:2]:
        raise ValueError("mark map and image differ in size")
    keep = retained_mask(marks, plan, text_table)
    out = img.copy()
    out[(marks.labels != BACKGROUND) & ~keep] = np.asarray(bg, dtype=np.uint8)
    return out

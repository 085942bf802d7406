"""End-to-end chart transform: segment, mask, reduce contrast, report."""
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, text_mask_table
from .contrast import check_contrast, reduce_contrast
from .errors import ConfigError, DegenerateHistogramError, NoMarksError, UnknownChartTypeError
from .mask import (ADAPTIVE, MaskPlan, _check_size, apply_masking, area_pattern, line_pattern,
                   retained_mask)
from .perception import (DEFAULT_DISTANCES, DEFAULT_PPI, CsfModel, ViewingGeometry,
                         predict_visibility)
from .raster import as_raster, lightness
from .segment import BACKGROUND, LABEL_NAMES, segment
from .spectral import PAPER_WHITE_L, signal_summary

CHART_TYPES = ("bar", "pie", "scatter", "line")
PRESETS = DEFAULTS["presets"]


@dataclass(frozen=True)
class ChartPreset:
    chart_type: str
    area_mask_n: int
    line_mask_n: int
    contrast: float
    name: str = None

    def __post_init__(self):
        if self.chart_type not in CHART_TYPES:
            raise UnknownChartTypeError(self.chart_type, CHART_TYPES)
        _check_size(self.area_mask_n)
        _check_size(self.line_mask_n)
        check_contrast(self.contrast)

    @property
    def primary_label(self):
        """The label carrying the chart's data marks."""
        return "line_mark" if self.chart_type == "line" else "area_mark"

    @property
    def mask_area(self):
        return self.line_mask_n if self.chart_type == "line" else self.area_mask_n

    def pair(self):
        """``(mask area, contrast)`` as chart parameters are usually quoted."""
        return (self.mask_area, self.contrast)

    def to_dict(self):
        return {"chartType": self.chart_type, "areaMaskN": self.area_mask_n,
                "lineMaskN": self.line_mask_n, "contrast": self.contrast, "name": self.name}


_KEYS = {"areaMaskN": "area_mask_n", "lineMaskN": "line_mask_n", "contrast": "contrast"}


def _from_doc(doc, name=None):
    return ChartPreset(doc["chartType"], int(doc["areaMaskN"]), int(doc["lineMaskN"]),
                       float(doc["contrast"]), name)


def load_preset(source, chart_type=None):
    """Preset by name, from a JSON file path, or from an override dict.

    Overrides are validated (odd mask sizes, contrast in [0, 100]) and laid
    over the shipped preset named by ``chartType`` (or ``chart_type``).
    """
    if isinstance(source, ChartPreset):
        return source
    if isinstance(source, str):
        if source in PRESETS:
            return _from_doc(PRESETS[source], source)
        if source.endswith(".json") or os.path.sep in source:
            try:
                with open(source) as fh:
                    source = json.load(fh)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot read preset file: {exc}") from exc
        else:
            raise UnknownChartTypeError(source, CHART_TYPES)
    if not isinstance(source, dict):
        raise ConfigError("preset must be a name, a JSON path or a dict")
    unknown = set(source) - set(_KEYS) - {"chartType", "name"}
    if unknown:
        raise ConfigError(f"unknown preset keys: {sorted(unknown)}")
    for key in ("areaMaskN", "lineMaskN"):
        if key in source:
            _check_size(source[key])
    if "contrast" in source:
        check_contrast(source["contrast"])
    base_name = source.get("chartType", chart_type)
    if base_name is None:
        raise ConfigError("preset override needs a chartType")
    if base_name not in PRESETS:
        raise UnknownChartTypeError(base_name, CHART_TYPES)
    doc = dict(PRESETS[base_name])
    doc.update({k: v for k, v in source.items() if k in _KEYS})
    return _from_doc(doc, source.get("name", base_name))


def mask_plan(preset, granularity="fine"):
    """Label -> pattern mapping for a preset.

    ``coarse`` masks every label with the area mask; ``fine`` gives lines
    and area borders the line mask and sizes text masks from stroke width.
    """
    if granularity == "coarse":
        p = area_pattern(preset.area_mask_n)
        return MaskPlan({"area_mark": p, "area_border": p, "line_mark": p, "text": p})
    if granularity != "fine":
        raise ConfigError(f"granularity must be 'fine' or 'coarse', got {granularity!r}")
    line = line_pattern(preset.line_mask_n)
    return MaskPlan({"area_mark": area_pattern(preset.area_mask_n), "line_mark": line,
                     "area_border": line, "text": ADAPTIVE})


@dataclass
class TransformReport:
    preset: dict
    granularity: str
    retained_fraction: dict
    clamp_count: int
    centroid_before: float = None
    centroid_after: float = None
    non_dc_before: float = None
    non_dc_after: float = None
    visibility: list = field(default_factory=list)
    text_source: str = None
    text_boxes: int = 0
    input_path: str = None
    output_path: str = None

    def to_dict(self):
        return {
            "input": self.input_path, "output": self.output_path,
            "preset": self.preset, "granularity": self.granularity,
            "retained_fraction": self.retained_fraction, "clamp_count": self.clamp_count,
            "spectral": {"centroid_before": self.centroid_before,
                         "centroid_after": self.centroid_after,
                         "non_dc_energy_fraction_before": self.non_dc_before,
                         "non_dc_energy_fraction_after": self.non_dc_after},
            "text": {"source": self.text_source, "boxes": self.text_boxes},
            "visibility": self.visibility,
        }


@dataclass
class TransformResult:
    """Everything a transform produced; unpacks as ``(image, report)``."""
    image: np.ndarray
    report: TransformReport
    marks: object = None
    retained: np.ndarray = None

    def __iter__(self):
        return iter((self.image, self.report))


def transform(img, preset, text=None, granularity="fine", distances=DEFAULT_DISTANCES,
              ppi=DEFAULT_PPI, csf=None, analyze=True, threads=1):
    """Make a chart image legible up close and illegible from afar.

    Foreground -> mark classification -> tiled masking -> contrast
    reduction on the surviving mark pixels. Background pixels are never
    changed. Returns a :class:`TransformResult` (unpackable as
    ``image, report``).
    """
    img = as_raster(img)
    preset = load_preset(preset)
    plan = mask_plan(preset, granularity)
    light = lightness(img)
    try:
        marks, bg, text = segment(img, text, threads=threads, light=light)
    except DegenerateHistogramError as exc:
        raise NoMarksError("image has no marks distinguishable from the background") from exc
    if not (marks.labels != BACKGROUND).any():
        raise NoMarksError("image has no marks distinguishable from the background")
    keep = retained_mask(marks, plan, text_mask_table())
    masked = apply_masking(img, marks, plan, bg)
    bg_l = float(lightness(np.array([[bg]], dtype=np.uint8))[0, 0])
    out, clamped = reduce_contrast(masked, marks.restricted(keep), preset.contrast, bg_l,
                                   return_clamped=True)

    fractions = {}
    for i, name in enumerate(LABEL_NAMES):
        if i == BACKGROUND:
            continue
        sel = marks.labels == i
        total = int(sel.sum())
        fractions[name] = None if total == 0 else float(keep[sel].sum()) / total
    report = TransformReport(preset.to_dict(), granularity, fractions, clamped,
                             text_source=text.source, text_boxes=len(text.boxes))
    if analyze:
        # only mark pixels change, so re-measure just those
        changed = marks.labels != BACKGROUND
        light_out = light.copy()
        light_out[changed] = lightness(out[changed])
        before = signal_summary(PAPER_WHITE_L - light)
        after = signal_summary(PAPER_WHITE_L - light_out)
        report.centroid_before = before["radial_centroid"]
        report.centroid_after = after["radial_centroid"]
        report.non_dc_before = before["non_dc_energy_fraction"]
        report.non_dc_after = after["non_dc_energy_fraction"]
    for d in distances:
        vis = predict_visibility(preset, ViewingGeometry(float(d), ppi), csf or CsfModel(),
                                 granularity, bg_l=100.0)
        report.visibility.append(vis.to_dict())
    return TransformResult(out, report, marks, keep)

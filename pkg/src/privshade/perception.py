"""Contrast-sensitivity model of how masked marks read at a distance.

A masked region is treated as a grating with one cycle per mask tile. Its
angular frequency follows from screen density and viewing distance; it is
visible when its Michelson contrast reaches the threshold ``1 / S(f)`` of
the contrast sensitivity function.
"""
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULTS, text_mask_table
from .mask import area_pattern, line_pattern, text_mask_size
from .raster import as_raster, lab_to_rgb, rgb_to_lab

CM_PER_INCH = 2.54
DEFAULT_PPI = float(DEFAULTS["viewing"]["ppi"])
DEFAULT_DISTANCES = tuple(float(d) for d in DEFAULTS["viewing"]["distances_cm"])
DEFAULT_TEXT_STROKE = 2.0


@dataclass(frozen=True)
class ViewingGeometry:
    distance: float              # cm, on-axis
    ppi: float = DEFAULT_PPI

    def __post_init__(self):
        if not (self.distance > 0 and self.ppi > 0):
            raise ValueError("distance and ppi must be positive")

    @property
    def pixel_pitch_cm(self):
        return CM_PER_INCH / self.ppi

    @property
    def degrees_per_pixel(self):
        return math.degrees(2.0 * math.atan(self.pixel_pitch_cm / (2.0 * self.distance)))


@dataclass(frozen=True)
class CsfModel:
    """Mannos-Sakrison style band-pass CSF, ``A (a + b f) exp(-(b f)^c)``.

    ``duty_cycle`` scales a pattern's contrast by the fraction of pixels its
    mask keeps.
    """
    A: float = DEFAULTS["csf"]["A"]
    a: float = DEFAULTS["csf"]["a"]
    b: float = DEFAULTS["csf"]["b"]
    c: float = DEFAULTS["csf"]["c"]
    duty_cycle: bool = DEFAULTS["csf"]["duty_cycle"]

    def sensitivity(self, f):
        f = np.asarray(f, dtype=np.float64)
        bf = self.b * f
        return self.A * (self.a + bf) * np.exp(-np.power(bf, self.c))

    def threshold(self, f):
        return 1.0 / self.sensitivity(f)

    @property
    def peak_frequency(self):
        res = minimize_scalar(lambda x: -math.log(float(self.sensitivity(math.exp(x)))),
                              bounds=(math.log(1e-4), math.log(60.0)), method="bounded",
                              options={"xatol": 1e-10})
        return math.exp(res.x)

    def attenuation(self, f):
        """Gain relative to the peak; 1 at and below the peak frequency."""
        f = np.asarray(f, dtype=np.float64)
        fp = self.peak_frequency
        gain = self.sensitivity(np.maximum(f, fp)) / self.sensitivity(fp)
        return np.minimum(gain, 1.0)

    @classmethod
    def from_dict(cls, doc):
        keys = {"A", "a", "b", "c", "duty_cycle"}
        return cls(**{k: v for k, v in doc.items() if k in keys})


def spatial_frequency(mask_n, geom):
    """Cycles per degree of a pattern repeating every ``mask_n`` pixels."""
    if mask_n < 1:
        raise ValueError("mask size must be >= 1")
    period_cm = mask_n * geom.pixel_pitch_cm
    theta = math.degrees(2.0 * math.atan(period_cm / (2.0 * geom.distance)))
    return 1.0 / theta


def relative_luminance(l_star):
    """Inverse CIE lightness: L* -> Y with white = 1."""
    l_star = np.asarray(l_star, dtype=np.float64)
    ft = (l_star + 16.0) / 116.0
    return np.where(ft ** 3 > 216.0 / 24389.0, ft ** 3, l_star * 27.0 / 24389.0)


def michelson_contrast(mark_l, bg_l):
    y1, y2 = float(relative_luminance(mark_l)), float(relative_luminance(bg_l))
    hi, lo = max(y1, y2), min(y1, y2)
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


@dataclass
class LabelVisibility:
    mask_n: int
    frequency: float        # cycles/degree
    contrast: float         # Michelson, after any duty-cycle scaling
    threshold: float
    margin: float
    verdict: str


@dataclass
class VisibilityReport:
    chart_type: str
    distance: float
    ppi: float
    labels: dict = field(default_factory=dict)
    primary: str = "area_mark"

    @property
    def verdict(self):
        return self.labels[self.primary].verdict

    @property
    def margin(self):
        return self.labels[self.primary].margin

    @property
    def visible(self):
        return self.verdict == "visible"

    def to_dict(self):
        return {"chart_type": self.chart_type, "distance_cm": self.distance, "ppi": self.ppi,
                "primary_label": self.primary, "verdict": self.verdict, "margin": self.margin,
                "labels": {k: asdict(v) for k, v in self.labels.items()}}


def label_patterns(preset, granularity="fine", text_stroke=DEFAULT_TEXT_STROKE):
    """Mask pattern each label receives under ``preset``."""
    if granularity == "coarse":
        p = area_pattern(preset.area_mask_n)
        return {"area_mark": p, "area_border": p, "line_mark": p, "text": p}
    return {
        "area_mark": area_pattern(preset.area_mask_n),
        "area_border": line_pattern(preset.line_mask_n),
        "line_mark": line_pattern(preset.line_mask_n),
        "text": line_pattern(text_mask_size(text_stroke, text_mask_table())),
    }


def predict_visibility(preset, geom, csf=None, granularity="fine", bg_l=100.0,
                       text_stroke=DEFAULT_TEXT_STROKE):
    """Per-label visibility of ``preset``'s output seen from ``geom``.

    The chart-level verdict is that of the preset's primary mark label.
    """
    csf = csf or CsfModel()
    mark_l = max(0.0, bg_l - preset.contrast)
    base = michelson_contrast(mark_l, bg_l)
    report = VisibilityReport(preset.chart_type, geom.distance, geom.ppi,
                              primary=preset.primary_label)
    for name, pat in label_patterns(preset, granularity, text_stroke).items():
        f = spatial_frequency(pat.n, geom)
        contrast = base * pat.retained_fraction if csf.duty_cycle else base
        thr = float(csf.threshold(f))
        margin = contrast / thr
        report.labels[name] = LabelVisibility(pat.n, f, contrast, thr, margin,
                                              "visible" if margin >= 1.0 else "invisible")
    return report


def frequency_grid_cpd(shape, geom):
    """Radial frequency of each ``rfft2`` bin in cycles/degree."""
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.rfftfreq(w)[None, :]
    return np.hypot(fy, fx) / geom.degrees_per_pixel


def simulate_lab(img, geom, csf=None):
    """Float Lab percept of ``img`` seen from ``geom``.

    Every Lab channel is filtered by the CSF attenuation relative to its
    peak, so content below the peak passes unchanged.
    """
    csf = csf or CsfModel()
    img = as_raster(img)
    lab = rgb_to_lab(img)
    gain = csf.attenuation(frequency_grid_cpd(img.shape[:2], geom))
    out = np.empty_like(lab)
    for ch in range(3):
        spec = np.fft.rfft2(lab[..., ch])
        out[..., ch] = np.fft.irfft2(spec * gain, s=img.shape[:2])
    out[..., 0] = np.clip(out[..., 0], 0.0, 100.0)
    return out


def simulate_view(img, geom, csf=None):
    """Approximate what a viewer at ``geom`` resolves, as an RGB image."""
    return lab_to_rgb(simulate_lab(img, geom, csf))

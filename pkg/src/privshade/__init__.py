"""Privacy-preserving chart transforms.

Charts are split into labelled marks, thinned to one kept pixel per tile,
and pulled toward the background in CIELAB. A contrast sensitivity model
predicts at which viewing distances the result stays legible.
"""
from .contrast import reduce_contrast
from .corpus import ChartSpec, corpus, generate, write_corpus
from .errors import PrivshadeError
from .mask import MaskPlan, area_pattern, line_pattern, retained_mask, apply_masking
from .perception import CsfModel, ViewingGeometry, predict_visibility, simulate_view
from .pipeline import ChartPreset, load_preset, mask_plan, transform
from .raster import decode_png, encode_png, lab_to_rgb, lightness, read_png, rgb_to_lab
from .segment import TextAnnotation, segment, skeletonize
from .spectral import frequency_summary, magnitude_spectrum

__version__ = "0.1.0"

__all__ = [
    "ChartPreset", "ChartSpec", "CsfModel", "MaskPlan", "PrivshadeError", "TextAnnotation",
    "ViewingGeometry", "apply_masking", "area_pattern", "corpus", "decode_png", "encode_png",
    "frequency_summary", "generate", "lab_to_rgb", "lightness", "line_pattern", "load_preset",
    "magnitude_spectrum", "mask_plan", "predict_visibility", "read_png", "reduce_contrast",
    "retained_mask", "rgb_to_lab", "segment", "simulate_view", "skeletonize", "transform",
    "write_corpus",
]

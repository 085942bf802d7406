"""Luminance contrast reduction in CIELAB."""
import numpy as np

from .errors import InvalidContrastError
from .raster import (as_raster, lab_to_linear_rgb, lab_to_rgb, pack_rgb, rgb_to_lab,
                     unpack_rgb)
from .segment import BACKGROUND

_GAMUT_TOL = 1e-9
_BISECT_STEPS = 40


def check_contrast(c):
    if c is None or not (0.0 <= float(c) <= 100.0):
        raise InvalidContrastError(f"contrast must lie in [0, 100], got {c!r}")
    return float(c)


def _in_gamut(lab):
    lin = lab_to_linear_rgb(lab)
    return np.all((lin >= -_GAMUT_TOL) & (lin <= 1.0 + _GAMUT_TOL), axis=-1)


def fit_chroma(lab):
    """Scale a*, b* toward zero until each color fits in sRGB.

    L* and hue angle are kept; returns ``(lab, reduced)`` where ``reduced``
    flags colors whose chroma had to shrink.
    """
    lab = np.array(lab, dtype=np.float64)
    lab[..., 0] = np.clip(lab[..., 0], 0.0, 100.0)
    ok = _in_gamut(lab)
    if ok.all():
        return lab, ~ok
    todo = np.flatnonzero(~ok.ravel())
    flat = lab.reshape(-1, 3)
    sub = flat[todo]
    lo = np.zeros(len(todo))
    hi = np.ones(len(todo))
    for _ in range(_BISECT_STEPS):
        mid = (lo + hi) / 2
        trial = sub.copy()
        trial[:, 1:] *= mid[:, None]
        inside = _in_gamut(trial)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    sub[:, 1:] *= lo[:, None]
    flat[todo] = sub
    return lab, ~ok


def reduce_contrast(img, marks, c, bg_l=100.0, return_clamped=False):
    """Set every mark pixel's L* to ``bg_l - c`` (clamped to [0, 100]).

    Hue is kept; chroma is pulled in only as far as needed to stay inside
    sRGB, so the requested L* survives conversion back to 8-bit. Background
    pixels are not touched. With ``return_clamped=True`` also returns how
    many mark pixels needed their chroma reduced.
    """
    c = check_contrast(c)
    img = as_raster(img)
    sel = np.asarray(marks.labels if hasattr(marks, "labels") else marks)
    sel = sel != BACKGROUND if sel.dtype != bool else sel
    out = img.copy()
    if not sel.any():
        return (out, 0) if return_clamped else out
    target = float(np.clip(bg_l - c, 0.0, 100.0))
    # convert each distinct color once
    keys, inverse = np.unique(pack_rgb(img[sel]), return_inverse=True)
    lab = rgb_to_lab(unpack_rgb(keys)[None])[0]
    lab[:, 0] = target
    lab, reduced = fit_chroma(lab)
    rgb = lab_to_rgb(lab[None])[0]
    out[sel] = rgb[inverse.ravel()]
    clamped = int(np.bincount(inverse.ravel(), minlength=len(keys))[reduced].sum())
    return (out, clamped) if return_clamped else out


"""Frequency-domain summaries of an image's lightness.

The spectrum is taken of the L* channel measured downward from paper white,
``100 - L*``. Away from DC this has exactly the magnitudes of the plain L*
spectrum; referencing white means a blank page carries no energy and marks
are what the DC bin and the rest of the spectrum describe.
"""
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .raster import as_raster, lightness

PAPER_WHITE_L = 100.0
ROUNDOFF = 1e-12


@dataclass(frozen=True)
class FrequencySpectrum:
    """Centered (``fftshift``-ed) DFT magnitudes.

    ``magnitude[height // 2, width // 2]`` is the DC bin.
    """
    magnitude: np.ndarray
    signal_energy: float  # sum of squared spatial samples, for Parseval checks

    @property
    def height(self):
        return self.magnitude.shape[0]

    @property
    def width(self):
        return self.magnitude.shape[1]

    @property
    def dc_index(self):
        return self.height // 2, self.width // 2

    @property
    def energy(self):
        return self.magnitude ** 2

    def parseval_error(self):
        """Relative mismatch between spectral and spatial energy."""
        spectral = float(self.energy.sum()) / self.magnitude.size
        if self.signal_energy == 0.0:
            return abs(spectral)
        return abs(spectral - self.signal_energy) / self.signal_energy

    def non_dc_energy_fraction(self):
        total = float(self.energy.sum())
        if total == 0.0:
            return 0.0
        frac = 1.0 - float(self.energy[self.dc_index]) / total
        return 0.0 if frac <= ROUNDOFF else frac


def magnitude_spectrum_of(signal):
    """Spectrum of an arbitrary real 2-D array (no color handling)."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim != 2 or signal.size == 0:
        raise ValueError("expected a nonempty 2-D array")
    mag = np.abs(np.fft.fftshift(np.fft.fft2(signal)))
    return FrequencySpectrum(mag, float(np.sum(signal ** 2)))


def magnitude_spectrum(img):
    """Centered DFT magnitude of the image's L* channel (relative to white)."""
    img = as_raster(img)
    return magnitude_spectrum_of(PAPER_WHITE_L - lightness(img))


def normalized_radius(shape):
    """Per-bin radial frequency for a centered spectrum of ``shape``.

    Radii are in cycles/pixel divided by the corner radius ``sqrt(0.5)`` so
    every bin falls in [0, 1].
    """
    h, w = shape
    fy = np.fft.fftshift(np.fft.fftfreq(h))
    fx = np.fft.fftshift(np.fft.fftfreq(w))
    r = np.hypot(fy[:, None], fx[None, :])
    return r / np.sqrt(0.5)


def radial_energy_centroid(spec):
    """Energy-weighted mean radius of the non-DC bins, in [0, 1].

    Returns 0 when there is no energy outside DC. Non-DC energy at
    round-off level (a constant image) counts as none.
    """
    energy = spec.energy.copy()
    dc = energy[spec.dc_index]
    energy[spec.dc_index] = 0.0
    total = energy.sum()
    if total <= ROUNDOFF * (total + dc):
        return 0.0
    return float((energy * normalized_radius(energy.shape)).sum() / total)


def log_magnitude_image(spec):
    """Log-magnitude spectrum scaled to an 8-bit grayscale RGB image."""
    logmag = np.log1p(spec.magnitude)
    top = logmag.max()
    scaled = np.zeros_like(logmag) if top == 0 else logmag / top
    gray = np.rint(scaled * 255).astype(np.uint8)
    return np.repeat(gray[..., None], 3, axis=2)


def signal_summary(signal):
    """Non-DC energy fraction and radial centroid without the full spectrum.

    A real signal's spectrum is conjugate-symmetric, so the half computed by
    ``rfft2`` carries everything once its interior columns count twice.
    Values match :func:`radial_energy_centroid` and
    :meth:`FrequencySpectrum.non_dc_energy_fraction` on the full spectrum.
    """
    signal = np.asarray(signal, dtype=np.float64)
    h, w = signal.shape
    energy = np.abs(sp_fft.rfft2(signal)) ** 2
    weight = np.full(energy.shape[1], 2.0)
    weight[0] = 1.0
    if w % 2 == 0:
        weight[-1] = 1.0
    energy *= weight
    dc = float(energy[0, 0])
    energy[0, 0] = 0.0
    non_dc = float(energy.sum())
    total = non_dc + dc
    if total == 0.0 or non_dc <= ROUNDOFF * total:
        return {"non_dc_energy_fraction": 0.0, "radial_centroid": 0.0}
    radius = np.hypot(np.fft.fftfreq(h)[:, None], np.fft.rfftfreq(w)[None, :]) / np.sqrt(0.5)
    return {
        "non_dc_energy_fraction": non_dc / total,
        "radial_centroid": float((energy * radius).sum() / non_dc),
    }


def frequency_summary(img):
    """``{non_dc_energy_fraction, radial_centroid}`` of an image."""
    return signal_summary(PAPER_WHITE_L - lightness(as_raster(img)))

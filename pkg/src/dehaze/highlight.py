"""Homomorphic flash/highlight suppression.

The log image is compared against a median-smoothed reference; the low-pass
part of that difference is treated as excess illumination and divided out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._filters import median_filter
from .image import as_rgb


@dataclass(frozen=True)
class HighlightConfig:
    median_radius: int = 7
    butterworth_cutoff: float = 0.08
    butterworth_order: int = 2
    log_floor: float = 1e-4

    def __post_init__(self):
        if self.median_radius < 1:
            raise ValueError("median_radius must be >= 1")
        if not 0.0 < self.butterworth_cutoff < 1.0:
            raise ValueError("butterworth_cutoff must lie in (0, 1)")
        if self.butterworth_order < 1:
            raise ValueError("butterworth_order must be >= 1")
        if self.log_floor <= 0.0:
            raise ValueError("log_floor must be > 0")


def log_radiance(img: np.ndarray, cfg: HighlightConfig = HighlightConfig()) -> np.ndarray:
    """Natural log per channel, floored at ``cfg.log_floor``. Returns (H, W, 3)."""
    img = as_rgb(img)
    return np.log(np.maximum(img, cfg.log_floor))


def median_log(log_img: np.ndarray, cfg: HighlightConfig = HighlightConfig()) -> np.ndarray:
    """Cross-channel median per pixel, then a spatial median window."""
    per_pixel = np.median(np.asarray(log_img, dtype=np.float64), axis=2)
    return median_filter(per_pixel, cfg.median_radius)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def butterworth_response(shape: tuple[int, int], cutoff: float, order: int) -> np.ndarray:
    """Low-pass gain on the unshifted FFT grid of ``shape``.

    Radial frequency is in cycles/pixel, so the Nyquist radius is 0.5 and the
    cutoff radius is ``cutoff * 0.5``.
    """
    fy = np.fft.fftfreq(shape[0])[:, None]
    fx = np.fft.fftfreq(shape[1])[None, :]
    d = np.hypot(fy, fx)
    d0 = cutoff * 0.5
    return 1.0 / (1.0 + (d / d0) ** (2 * order))


def butterworth_lowpass(values: np.ndarray, cutoff: float, order: int) -> np.ndarray:
    """Frequency-domain Butterworth low-pass with mirror padding to a power of two."""
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape
    ph, pw = _next_pow2(h), _next_pow2(w)
    padded = np.pad(values, ((0, ph - h), (0, pw - w)), mode="reflect") if (ph, pw) != (h, w) else values
    spectrum = np.fft.rfft2(padded)
    gain = butterworth_response((ph, pw), cutoff, order)[:, : pw // 2 + 1]
    return np.fft.irfft2(spectrum * gain, s=(ph, pw))[:h, :w]


def illumination_residue(
    log_img: np.ndarray, med: np.ndarray, cfg: HighlightConfig = HighlightConfig()
) -> np.ndarray:
    """Low-passed difference between each log channel and the median map."""
    log_img = np.asarray(log_img, dtype=np.float64)
    med = np.asarray(med, dtype=np.float64)
    if log_img.shape[:2] != med.shape:
        raise ValueError(f"dimension mismatch: {log_img.shape[:2]} vs {med.shape}")
    diff = log_img - med[..., None]
    return np.stack(
        [butterworth_lowpass(diff[..., c], cfg.butterworth_cutoff, cfg.butterworth_order) for c in range(3)],
        axis=2,
    )


def correct_highlights(img: np.ndarray, cfg: HighlightConfig = HighlightConfig()) -> np.ndarray:
    """Divide out the low-frequency excess illumination. Output is clamped to [0, 1]."""
    img = as_rgb(img)
    logs = log_radiance(img, cfg)
    residue = illumination_residue(logs, median_log(logs, cfg), cfg)
    return np.clip(img / np.exp(residue), 0.0, 1.0)

"""Dark channel and rough transmission."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._filters import min_filter
from .image import as_map, as_rgb


@dataclass(frozen=True)
class TransmissionConfig:
    patch_radius: int = 7
    kappa: float = 0.95
    t_min: float = 0.05

    def __post_init__(self):
        if self.patch_radius < 0:
            raise ValueError("patch_radius must be >= 0")
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError("kappa must lie in (0, 1]")
        if not 0.0 < self.t_min < 1.0:
            raise ValueError("t_min must lie in (0, 1)")


def dark_channel(img: np.ndarray, cfg: TransmissionConfig = TransmissionConfig()) -> np.ndarray:
    """Minimum over channels of the windowed minimum, window truncated at borders."""
    img = as_rgb(img)
    return min_filter(img.min(axis=2), cfg.patch_radius)


def rough_transmission(dark: np.ndarray, cfg: TransmissionConfig = TransmissionConfig()) -> np.ndarray:
    """``1 - kappa * dark`` floored at ``t_min``.

    The dark channel is used as-is, without normalizing by the airlight.
    """
    dark = as_map(dark)
    return np.clip(1.0 - cfg.kappa * dark, cfg.t_min, 1.0)

"""Scene radiance recovery by inverting the haze model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .airlight import AtmosphericLight
from .image import as_map, as_rgb, check_same_size


@dataclass(frozen=True)
class RecoveryConfig:
    epsilon: float = 0.0001

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


def recover_unclamped(
    img: np.ndarray, t: np.ndarray, a: AtmosphericLight, cfg: RecoveryConfig = RecoveryConfig()
) -> np.ndarray:
    img = as_rgb(img)
    t = as_map(t)
    check_same_size(img, t)
    airlight = a.as_array()
    return (img - airlight) / np.maximum(t, cfg.epsilon)[..., None] + airlight


def recover(
    img: np.ndarray, t: np.ndarray, a: AtmosphericLight, cfg: RecoveryConfig = RecoveryConfig()
) -> np.ndarray:
    """``(I - A) / max(T, eps) + A`` per channel, clamped to [0, 1]."""
    return np.clip(recover_unclamped(img, t, a, cfg), 0.0, 1.0)

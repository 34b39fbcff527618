"""Semi-globally adaptive filter for transmission refinement.

For a pixel pair (p, q) the kernel weight is

    W_pq = sum over windows k containing both p and q of
           (1 + (I_p - mu_k)(I_q - mu_k) / (var_k + eps)) / |w_k|^2

with mu_k, var_k the guidance mean and variance in window k and |w_k| its
true (border-truncated) pixel count. Summing over q first collapses the
filter into per-window linear coefficients, so the whole thing costs a
handful of box sums:

    out_p = sum_k (a_k I_p + b_k) / |w_k|  /  sum_k 1 / |w_k|

where a_k = cov_k(I, T) / (var_k + eps) and b_k = mean_k(T) - a_k mu_k.
In the interior all windows have the same size and this is exactly the
guided filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._filters import box_sum, window_count
from .image import as_map, as_rgb, check_same_size, to_gray


@dataclass(frozen=True)
class SafConfig:
    window_radius: int = 20
    epsilon_saf: float = 1e-3

    def __post_init__(self):
        if self.window_radius < 1:
            raise ValueError("window_radius must be >= 1")
        if self.epsilon_saf <= 0.0:
            raise ValueError("epsilon_saf must be > 0")


def saf_filter_unclamped(rough: np.ndarray, guide: np.ndarray, cfg: SafConfig = SafConfig()) -> np.ndarray:
    rough = as_map(rough)
    guide = as_map(guide)
    check_same_size(rough, guide)
    r = cfg.window_radius
    n = window_count(rough.shape, r)
    mu = box_sum(guide, r) / n
    mean_t = box_sum(rough, r) / n
    var = box_sum(guide * guide, r) / n - mu * mu
    cov = box_sum(guide * rough, r) / n - mu * mean_t
    a = cov / (np.maximum(var, 0.0) + cfg.epsilon_saf)
    b = mean_t - a * mu
    inv_n = 1.0 / n
    return (box_sum(a * inv_n, r) * guide + box_sum(b * inv_n, r)) / box_sum(inv_n, r)


def saf_filter(rough: np.ndarray, guide: np.ndarray, cfg: SafConfig = SafConfig()) -> np.ndarray:
    """Edge-aware weighted average of ``rough`` under scalar ``guide``.

    Negative kernel weights are kept; the result is clamped to
    ``[min(rough), 1]`` instead.
    """
    out = saf_filter_unclamped(rough, guide, cfg)
    return np.clip(out, float(np.min(rough)), 1.0)


def refine_transmission(rough: np.ndarray, wb_img: np.ndarray, cfg: SafConfig = SafConfig()) -> np.ndarray:
    """Refine ``rough`` guided by the gray projection of the white-balanced image."""
    wb_img = as_rgb(wb_img)
    rough = as_map(rough)
    check_same_size(rough, wb_img)
    return saf_filter(rough, to_gray(wb_img), cfg)

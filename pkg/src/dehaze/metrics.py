"""Image quality metrics: SSIM, PSNR, CNR and the visible new-edge rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._filters import box_mean
from .image import as_rgb, check_same_size, to_gray

PSNR_CAP = 99.0
MAD_TO_SIGMA = 1.4826


@dataclass(frozen=True)
class MetricsConfig:
    ssim_window: int = 8
    ssim_k1: float = 0.01
    ssim_k2: float = 0.03
    edge_threshold: float = 0.05
    cnr_block: int = 16

    def __post_init__(self):
        for name in ("ssim_window", "ssim_k1", "ssim_k2", "edge_threshold", "cnr_block"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class MetricsReport:
    cnr: float
    new_edge_rate: float
    ssim: float | None = None
    psnr: float | None = None

    def lines(self) -> list[str]:
        out = []
        for name in ("cnr", "ssim", "psnr", "new_edge_rate"):
            value = getattr(self, name)
            if value is not None:
                out.append(f"metric {name} {value:.4f}")
        return out

    def format(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _pair(a, b):
    a, b = as_rgb(a), as_rgb(b)
    check_same_size(a, b)
    return a, b


def _window_sums(x: np.ndarray, k: int) -> np.ndarray:
    # sums over every fully contained k x k window (stride 1)
    c = np.zeros((x.shape[0] + 1, x.shape[1] + 1))
    c[1:, 1:] = x.cumsum(0).cumsum(1)
    return c[k:, k:] - c[:-k, k:] - c[k:, :-k] + c[:-k, :-k]


def ssim(ref: np.ndarray, test: np.ndarray, cfg: MetricsConfig = MetricsConfig()) -> float:
    """Mean SSIM over uniform k x k windows (stride 1) of the gray projections.

    Windows larger than the image shrink to its smaller side.
    """
    ref, test = _pair(ref, test)
    x, y = to_gray(ref), to_gray(test)
    k = min(cfg.ssim_window, *x.shape)
    n = float(k * k)
    mx, my = _window_sums(x, k) / n, _window_sums(y, k) / n
    vx = _window_sums(x * x, k) / n - mx * mx
    vy = _window_sums(y * y, k) / n - my * my
    cxy = _window_sums(x * y, k) / n - mx * my
    c1, c2 = cfg.ssim_k1 ** 2, cfg.ssim_k2 ** 2
    s = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    return float(np.clip(s.mean(), 0.0, 1.0))


def psnr(ref: np.ndarray, test: np.ndarray) -> float:
    """Peak signal-to-noise ratio for unit peak, capped at 99 dB."""
    ref, test = _pair(ref, test)
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(1.0 / mse))


def noise_sigma(gray: np.ndarray) -> float:
    """Robust noise level: MAD-scaled spread of the 3x3 high-pass residual."""
    residual = gray - box_mean(gray, 1)
    return MAD_TO_SIGMA * float(np.median(np.abs(residual - np.median(residual))))


def block_contrast(gray: np.ndarray, block: int) -> float:
    """Mean absolute deviation of block means from the global mean."""
    h, w = gray.shape
    mu = gray.mean()
    contrasts = [
        abs(gray[y : y + block, x : x + block].mean() - mu)
        for y in range(0, h, block)
        for x in range(0, w, block)
    ]
    return float(np.mean(contrasts))


def cnr(ref_or_hazy: np.ndarray, test: np.ndarray, cfg: MetricsConfig = MetricsConfig()) -> float:
    """Contrast-to-noise score of ``test`` squashed into [0, 100].

    The first argument only fixes the expected dimensions.
    """
    _, test = _pair(ref_or_hazy, test)
    gray = to_gray(test)
    raw = block_contrast(gray, cfg.cnr_block) / max(noise_sigma(gray), 1e-6)
    return 100.0 * raw / (raw + 1.0)


def sobel_magnitude(gray: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude scaled so a unit step reads 1.0."""
    p = np.pad(gray, 1, mode="edge")
    gx = (p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2])
    gy = (p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:])
    return np.hypot(gx, gy) / 4.0


def count_visible_edges(img: np.ndarray, threshold: float) -> int:
    return int(np.count_nonzero(sobel_magnitude(to_gray(as_rgb(img))) > threshold))


def new_edge_rate(hazy: np.ndarray, restored: np.ndarray, cfg: MetricsConfig = MetricsConfig()) -> float:
    """Percentage change in visible-edge pixels from ``hazy`` to ``restored``."""
    hazy, restored = _pair(hazy, restored)
    n_hazy = count_visible_edges(hazy, cfg.edge_threshold)
    n_restored = count_visible_edges(restored, cfg.edge_threshold)
    return 100.0 * (n_restored - n_hazy) / max(n_hazy, 1)


def report(
    reference: np.ndarray | None,
    hazy: np.ndarray,
    restored: np.ndarray,
    cfg: MetricsConfig = MetricsConfig(),
) -> MetricsReport:
    """CNR on ``restored``, edge rate hazy vs restored, SSIM/PSNR vs ``reference`` if given."""
    hazy, restored = _pair(hazy, restored)
    full_ref = {}
    if reference is not None:
        reference, _ = _pair(reference, restored)
        full_ref = {"ssim": ssim(reference, restored, cfg), "psnr": psnr(reference, restored)}
    return MetricsReport(
        cnr=cnr(hazy, restored, cfg),
        new_edge_rate=new_edge_rate(hazy, restored, cfg),
        **full_ref,
    )

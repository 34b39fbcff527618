"""Forward haze synthesis with the Koschmieder model, plus procedural scenes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .airlight import AtmosphericLight
from .image import as_map, as_rgb, check_same_size


@dataclass(frozen=True)
class HazeSynthesisParams:
    """Airlight plus either a constant transmission ``t0`` or a full map."""

    airlight: AtmosphericLight
    t0: float | None = None
    transmission: np.ndarray | None = None

    def __post_init__(self):
        if (self.t0 is None) == (self.transmission is None):
            raise ValueError("give exactly one of t0 or transmission")
        if self.t0 is not None and not 0.0 < self.t0 <= 1.0:
            raise ValueError("t0 must lie in (0, 1]")
        if self.transmission is not None:
            t = as_map(self.transmission)
            if t.min() <= 0.0 or t.max() > 1.0:
                raise ValueError("transmission map values must lie in (0, 1]")

    def transmission_map(self, shape: tuple[int, int]) -> np.ndarray:
        if self.transmission is None:
            return np.full(shape, float(self.t0))
        return as_map(self.transmission)


def synthesize(clear: np.ndarray, params: HazeSynthesisParams) -> np.ndarray:
    """``I = J T + (1 - T) A``; a convex combination, so no clamping."""
    clear = as_rgb(clear)
    t = params.transmission_map(clear.shape[:2])
    check_same_size(clear, t)
    t = t[..., None]
    return clear * t + (1.0 - t) * params.airlight.as_array()


def depth_ramp_transmission(width: int, height: int, beta: float, depth_max: float) -> np.ndarray:
    """``exp(-beta * d)`` with depth growing linearly from 0 (left) to ``depth_max`` (right)."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if depth_max <= 0:
        raise ValueError("depth_max must be > 0")
    if width == 1:
        row = np.ones(1)
    else:
        row = np.exp(-beta * depth_max * np.arange(width) / (width - 1))
    return np.tile(row, (height, 1))


def format_sidecar(airlight: AtmosphericLight, *, t0: float | None = None,
                   beta: float | None = None, depth_max: float | None = None) -> str:
    lines = [f"A {airlight.r!r} {airlight.g!r} {airlight.b!r}"]
    if t0 is not None:
        lines.append(f"t0 {t0!r}")
    else:
        lines.append(f"beta {beta!r} depth_max {depth_max!r}")
    return "\n".join(lines) + "\n"


def parse_sidecar(text: str) -> dict:
    """Inverse of :func:`format_sidecar`."""
    out = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "A":
            out["airlight"] = AtmosphericLight.from_array(parts[1:4])
        elif parts[0] == "t0":
            out["t0"] = float(parts[1])
        elif parts[0] == "beta":
            out["beta"] = float(parts[1])
            out["depth_max"] = float(parts[3])
        else:
            raise ValueError(f"unknown sidecar line: {line!r}")
    return out


# procedural clear scenes; the repository ships no image assets

def gradient_card(height: int, width: int, seed: int = 0) -> np.ndarray:
    """Smooth multi-color gradients with a few saturated color blocks."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width] / np.array([max(height - 1, 1), max(width - 1, 1)])[:, None, None]
    phase = rng.uniform(0, 2 * np.pi, 3)
    img = np.stack([0.5 + 0.45 * np.sin(2 * np.pi * (x * (c + 1) * 0.7 + y * 0.5) + phase[c]) for c in range(3)], axis=2)
    for _ in range(6):
        bh, bw = rng.integers(height // 8 + 1, height // 3 + 2), rng.integers(width // 8 + 1, width // 3 + 2)
        by, bx = rng.integers(0, max(height - bh, 1)), rng.integers(0, max(width - bw, 1))
        img[by : by + bh, bx : bx + bw] = rng.uniform(0.0, 1.0, 3)
    return np.clip(img, 0.0, 1.0)


def checkerboard(height: int, width: int, cell: int = 16, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    colors = rng.uniform(0.05, 0.95, (2, 3))
    yy, xx = np.mgrid[0:height, 0:width]
    parity = ((yy // cell) + (xx // cell)) % 2
    return colors[parity]


def textured_scene(height: int, width: int, seed: int = 0, n_colors: int = 4) -> np.ndarray:
    """Colored regions shaded by multiplicative texture.

    Every 15x15 neighborhood contains a near-black pixel, so the dark channel of
    the clear scene is close to zero, as for natural outdoor images.
    """
    rng = np.random.default_rng(seed)
    palette = rng.uniform(0.15, 1.0, (n_colors, 3))
    palette[np.arange(n_colors), rng.integers(0, 3, n_colors)] *= 0.25
    # Voronoi-like regions from random seeds
    seeds = rng.uniform(0, 1, (n_colors, 2)) * [height, width]
    yy, xx = np.mgrid[0:height, 0:width]
    d = (yy[..., None] - seeds[:, 0]) ** 2 + (xx[..., None] - seeds[:, 1]) ** 2
    label = np.argmin(d, axis=2)
    shade = 0.55 + 0.35 * rng.uniform(-1, 1, (height, width))
    img = palette[label] * shade[..., None]
    img[(yy % 7 == 3) & (xx % 7 == 3)] *= 0.05
    return np.clip(img, 0.0, 1.0)


def noise_texture(height: int, width: int, seed: int = 0) -> np.ndarray:
    """Smooth random texture over a colored background."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.2, 0.8, 3)
    coarse = rng.uniform(-1, 1, (height // 8 + 2, width // 8 + 2, 3))
    ys = np.linspace(0, coarse.shape[0] - 1.001, height)
    xs = np.linspace(0, coarse.shape[1] - 1.001, width)
    y0, x0 = ys.astype(int), xs.astype(int)
    fy, fx = (ys - y0)[:, None, None], (xs - x0)[None, :, None]
    c = coarse
    smooth = (c[y0][:, x0] * (1 - fy) * (1 - fx) + c[y0 + 1][:, x0] * fy * (1 - fx)
              + c[y0][:, x0 + 1] * (1 - fy) * fx + c[y0 + 1][:, x0 + 1] * fy * fx)
    fine = rng.uniform(-0.05, 0.05, (height, width, 3))
    return np.clip(base + 0.25 * smooth + fine, 0.0, 1.0)


SCENES = {
    "gradient": gradient_card,
    "checker": checkerboard,
    "textured": textured_scene,
    "noise": noise_texture,
}

"""Atmospheric light estimation.

The search runs on a highlight-corrected copy of the image so that lamps and
flashes cannot win the quad-tree descent. Orientation comes from color lines
when enough hazy patches agree, otherwise from the mean color of the selected
region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .highlight import HighlightConfig, correct_highlights
from .image import as_rgb, to_gray

MIN_COMPONENT = 0.05
MIN_PATCHES = 16
# fraction of valid patches whose plane must contain the voted direction
MIN_AGREEMENT = 0.5


class InsufficientStructureError(ValueError):
    """Too few usable color-line patches to vote on an airlight direction."""


@dataclass(frozen=True)
class AtmosphericLight:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in "rgb":
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 < v <= 1.0):
                raise ValueError(f"airlight component {name}={v} outside (0, 1]")

    @classmethod
    def from_array(cls, values) -> "AtmosphericLight":
        r, g, b = (float(v) for v in values)
        return cls(r, g, b)

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b])

    @property
    def direction(self) -> np.ndarray:
        v = self.as_array()
        return v / np.linalg.norm(v)


@dataclass(frozen=True)
class AirlightConfig:
    quadtree_min_side: int = 32
    patch_size: int = 8
    min_line_points: int = 32
    vote_angle_tolerance: float = 10.0
    max_component: float = 0.98

    def __post_init__(self):
        if self.quadtree_min_side < 2:
            raise ValueError("quadtree_min_side must be >= 2")
        if self.patch_size < 4:
            raise ValueError("patch_size must be >= 4")
        if self.min_line_points < 2:
            raise ValueError("min_line_points must be >= 2")
        if not 0.0 < self.vote_angle_tolerance < 90.0:
            raise ValueError("vote_angle_tolerance must lie in (0, 90)")
        if not MIN_COMPONENT <= self.max_component <= 1.0:
            raise ValueError(f"max_component must lie in [{MIN_COMPONENT}, 1]")


class Region(NamedTuple):
    x: int
    y: int
    w: int
    h: int

    def crop(self, img: np.ndarray) -> np.ndarray:
        return img[self.y : self.y + self.h, self.x : self.x + self.w]


class AirlightEstimate(NamedTuple):
    airlight: AtmosphericLight
    region: Region
    # None when the color-line vote failed or disagreed with the region color
    color_line_direction: np.ndarray | None


def quadtree_candidate(img: np.ndarray, cfg: AirlightConfig = AirlightConfig()) -> Region:
    """Descend into the quadrant with the highest mean-minus-std gray score.

    Splitting stops once the next quadrants would be narrower than
    ``quadtree_min_side``; ties go to the first quadrant in scan order.
    """
    gray = to_gray(as_rgb(img))
    region = Region(0, 0, gray.shape[1], gray.shape[0])
    while min(region.w, region.h) // 2 >= cfg.quadtree_min_side:
        hw, hh = region.w // 2, region.h // 2
        quads = [
            Region(region.x, region.y, hw, hh),
            Region(region.x + hw, region.y, region.w - hw, hh),
            Region(region.x, region.y + hh, hw, region.h - hh),
            Region(region.x + hw, region.y + hh, region.w - hw, region.h - hh),
        ]
        best, best_score = quads[0], -np.inf
        for q in quads:
            block = q.crop(gray)
            score = block.mean() - block.std()
            if score > best_score:
                best, best_score = q, score
        region = best
    return region


def _patch_normals(img: np.ndarray, cfg: AirlightConfig) -> np.ndarray:
    """Unit normals of the planes through the origin and each patch's color line."""
    p = cfg.patch_size
    h, w = img.shape[:2]
    normals = []
    for y in range(0, h - p + 1, p):
        for x in range(0, w - p + 1, p):
            pix = img[y : y + p, x : x + p].reshape(-1, 3)
            pix = pix[np.all(pix < cfg.max_component, axis=1)]
            if len(pix) < cfg.min_line_points:
                continue
            mean = pix.mean(axis=0)
            evals, evecs = np.linalg.eigh(np.cov(pix, rowvar=False, bias=True))
            # a color line needs one dominant spread direction above the noise
            if evals[2] < 1e-8 or evals[1] > 0.25 * evals[2]:
                continue
            normal = np.cross(evecs[:, 2], mean)
            norm = np.linalg.norm(normal)
            # a line through the origin carries no airlight component
            if norm < 1e-2 * np.linalg.norm(mean):
                continue
            normals.append(normal / norm)
    return np.array(normals).reshape(-1, 3)


def color_line_orientation(img: np.ndarray, cfg: AirlightConfig = AirlightConfig()) -> np.ndarray:
    """Airlight direction voted from per-patch color lines.

    Haze shifts every patch line by a multiple of the airlight, so the
    airlight lies in the plane spanned by each line and the origin. The
    returned unit vector is the one closest to all of those planes (the least
    eigenvector of the stacked plane normals), sign-fixed to a nonnegative
    component sum.
    """
    img = as_rgb(img)
    normals = _patch_normals(img, cfg)
    if len(normals) < MIN_PATCHES:
        raise InsufficientStructureError(f"only {len(normals)} usable color-line patches (need {MIN_PATCHES})")
    _, evecs = np.linalg.eigh(normals.T @ normals)
    direction = evecs[:, 0]
    if direction.sum() < 0:
        direction = -direction
    agree = np.abs(normals @ direction) <= np.sin(np.radians(cfg.vote_angle_tolerance))
    if agree.mean() < MIN_AGREEMENT:
        raise InsufficientStructureError(f"only {agree.mean():.0%} of patches agree on the airlight direction")
    return direction


def angle_between(u, v) -> float:
    """Angle in degrees between two 3-vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    c = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


def airlight_from_region(
    img: np.ndarray, region: Region, cfg: AirlightConfig = AirlightConfig()
) -> tuple[AtmosphericLight, np.ndarray | None]:
    """Airlight from the pixels of ``img`` inside ``region``.

    The color-line direction is used only when it agrees with the region's
    mean color within ``vote_angle_tolerance``; the second return value is
    that direction, or None when the region color was used instead.
    """
    img = as_rgb(img)
    block = region.crop(img).reshape(-1, 3)
    magnitude = float(to_gray(block).mean())
    mean_color = block.mean(axis=0)
    if np.linalg.norm(mean_color) > 0:
        direction = mean_color / np.linalg.norm(mean_color)
    else:
        direction = np.full(3, 1.0 / np.sqrt(3.0))

    voted = None
    try:
        candidate = color_line_orientation(img, cfg)
    except InsufficientStructureError:
        candidate = None
    if candidate is not None and angle_between(candidate, direction) <= cfg.vote_angle_tolerance:
        direction = voted = candidate

    a = np.clip(magnitude * direction / direction.max(), MIN_COMPONENT, cfg.max_component)
    return AtmosphericLight.from_array(a), voted


def estimate_airlight_details(
    img: np.ndarray,
    hl_cfg: HighlightConfig = HighlightConfig(),
    cfg: AirlightConfig = AirlightConfig(),
    *,
    search_img: np.ndarray | None = None,
    suppress_highlights: bool = True,
) -> AirlightEstimate:
    """Full estimate with the chosen region.

    The quad-tree search runs on the highlight-corrected ``search_img``
    (default: ``img`` itself); airlight statistics are read from ``img``.
    """
    img = as_rgb(img)
    search = img if search_img is None else as_rgb(search_img)
    if search.shape != img.shape:
        raise ValueError(f"dimension mismatch: {search.shape[:2]} vs {img.shape[:2]}")
    if suppress_highlights:
        search = correct_highlights(search, hl_cfg)
    region = quadtree_candidate(search, cfg)
    a, voted = airlight_from_region(img, region, cfg)
    return AirlightEstimate(a, region, voted)


def estimate_airlight(
    img: np.ndarray,
    hl_cfg: HighlightConfig = HighlightConfig(),
    cfg: AirlightConfig = AirlightConfig(),
    *,
    suppress_highlights: bool = True,
) -> AtmosphericLight:
    """Estimate the atmospheric light of ``img``.

    Magnitude is the mean gray level of the quad-tree region; components are
    clamped to ``[0.05, cfg.max_component]``.
    """
    return estimate_airlight_details(img, hl_cfg, cfg, suppress_highlights=suppress_highlights).airlight

import numpy as np
import pytest

from dehaze.airlight import (
    AirlightConfig,
    AtmosphericLight,
    InsufficientStructureError,
    Region,
    angle_between,
    color_line_orientation,
    estimate_airlight,
    estimate_airlight_details,
    quadtree_candidate,
)
from dehaze.image import white_balance
from conftest import TRUE_AIRLIGHT, hazy_scene

GRAY = np.ones(3)


def color_line_fixture(seed, airlight=(0.8, 0.8, 0.8), t=None, noise=0.0):
    """8x8 patches of one of two surface colors under random shading, each
    patch hazed with its own transmission."""
    rng = np.random.default_rng(seed)
    colors = np.array([(0.9, 0.3, 0.2), (0.2, 0.5, 0.9)])
    img = np.empty((96, 128, 3))
    for y in range(0, 96, 8):
        for x in range(0, 128, 8):
            surface = colors[rng.integers(2)]
            tp = rng.uniform(0.2, 0.9) if t is None else t
            shade = rng.uniform(0.2, 1.0, (8, 8, 1))
            img[y : y + 8, x : x + 8] = tp * shade * surface + (1 - tp) * np.asarray(airlight)
    return np.clip(img + rng.normal(0, noise, img.shape), 0, 1)


def test_atmospheric_light_invariants():
    a = AtmosphericLight(0.3, 0.4, 0.5)
    assert abs(np.linalg.norm(a.direction) - 1) < 1e-12
    for bad in [(0, 0.5, 0.5), (1.1, 0.5, 0.5), (np.nan, 0.5, 0.5)]:
        with pytest.raises(ValueError):
            AtmosphericLight(*bad)


def test_quadtree_finds_bright_quadrant():
    img = np.full((128, 128, 3), 0.3)
    img[:64, :64] = 0.9
    r = quadtree_candidate(img)
    assert r.x + r.w <= 64 and r.y + r.h <= 64


def test_quadtree_uniform_takes_first_quadrant():
    assert quadtree_candidate(np.full((128, 128, 3), 0.5)) == Region(0, 0, 32, 32)
    assert quadtree_candidate(np.full((100, 150, 3), 0.5)) == Region(0, 0, 75, 50)


def test_quadtree_small_image_whole():
    assert quadtree_candidate(np.full((16, 16, 3), 0.5), AirlightConfig(quadtree_min_side=32)) == Region(0, 0, 16, 16)


def test_quadtree_shift_invariant(rng):
    img = rng.uniform(0.1, 0.7, (256, 192, 3))
    img[140:200, 20:90] = 0.65
    assert quadtree_candidate(img) == quadtree_candidate(img + 0.2)


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("noise", [0.0, 0.01])
def test_color_lines_recover_gray_airlight(seed, noise):
    d = color_line_orientation(color_line_fixture(seed, noise=noise))
    assert angle_between(d, GRAY) < 5.0
    assert abs(np.linalg.norm(d) - 1) < 1e-9 and d.sum() >= 0


def test_color_lines_recover_colored_airlight():
    a = (0.9, 0.8, 0.6)
    assert angle_between(color_line_orientation(color_line_fixture(0, airlight=a)), a) < 5.0


def test_color_lines_uniform_image_insufficient():
    with pytest.raises(InsufficientStructureError):
        color_line_orientation(np.full((64, 64, 3), 0.4))


def test_color_lines_haze_free_rejected():
    # every line passes through the origin, so no patch carries airlight
    with pytest.raises(InsufficientStructureError):
        color_line_orientation(color_line_fixture(0, t=1.0))


def test_estimate_on_hazy_scene(small_hazy):
    _, hazy, _ = small_hazy
    a = estimate_airlight(hazy)
    assert angle_between(a.as_array(), TRUE_AIRLIGHT.as_array()) < 5.0
    np.testing.assert_allclose(a.as_array(), 0.8, atol=0.1)


@pytest.mark.parametrize("v", [0.01, 0.5, 0.99])
def test_estimate_uniform(v):
    vf = min(max(v, 0.05), 0.98)
    np.testing.assert_allclose(estimate_airlight(np.full((64, 64, 3), v)).as_array(), vf, atol=1e-12)


def test_estimate_deterministic(small_hazy):
    _, hazy, _ = small_hazy
    assert estimate_airlight(hazy) == estimate_airlight(hazy.copy())


def with_light(img, y, x, color=(1.0, 0.85, 0.45), size=30):
    lit = img.copy()
    lit[y : y + size, x : x + size] = color
    return lit


@pytest.mark.parametrize("pos", [(60, 20), (100, 200), (5, 120)])
def test_streetlight_ablation(small_hazy, pos):
    _, hazy, _ = small_hazy
    base = estimate_airlight(hazy).as_array()
    lit = with_light(hazy, *pos)
    wb = white_balance(lit)
    on = estimate_airlight_details(lit, search_img=wb).airlight.as_array()
    off = estimate_airlight_details(lit, search_img=wb, suppress_highlights=False).airlight.as_array()
    assert angle_between(on, base) < 2.0
    assert angle_between(on, TRUE_AIRLIGHT.as_array()) <= angle_between(off, TRUE_AIRLIGHT.as_array()) + 1e-9


def test_small_saturated_region_is_tolerated():
    _, hazy, _ = hazy_scene(200, 300, seed=1, sky_rows=50)
    base = estimate_airlight(hazy)
    cfg = AirlightConfig()
    side = int(np.sqrt(0.005 * 200 * 300))
    for y, x in [(10, 10), (120, 250), (60, 140)]:
        lit = with_light(hazy, y, x, color=(1.0, 1.0, 1.0), size=side)
        a = estimate_airlight(lit)
        assert angle_between(a.direction, base.direction) <= cfg.vote_angle_tolerance
        assert 0.05 <= min(a.as_array()) and max(a.as_array()) <= cfg.max_component

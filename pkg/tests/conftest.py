import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dehaze.airlight import AtmosphericLight
from dehaze.synth import HazeSynthesisParams, depth_ramp_transmission, synthesize, textured_scene

TRUE_AIRLIGHT = AtmosphericLight(0.8, 0.8, 0.8)


def hazy_scene(height=400, width=600, seed=0, sky_rows=None):
    """Clear textured ground under an overcast sky the color of the airlight,
    hazed with a left-to-right depth ramp (far side T = 0.25)."""
    clear = textured_scene(height, width, seed=seed)
    sky_rows = height // 4 if sky_rows is None else sky_rows
    clear[:sky_rows] = TRUE_AIRLIGHT.as_array()
    t = depth_ramp_transmission(width, height, np.log(4.0), 1.0)
    hazy = synthesize(clear, HazeSynthesisParams(TRUE_AIRLIGHT, transmission=t))
    return clear, hazy, t


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_hazy():
    return hazy_scene(160, 240, seed=3, sky_rows=40)

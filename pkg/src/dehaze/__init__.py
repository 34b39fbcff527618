"""Single-image haze removal with highlight-robust airlight estimation."""

from .airlight import (
    AirlightConfig,
    AtmosphericLight,
    InsufficientStructureError,
    color_line_orientation,
    estimate_airlight,
    quadtree_candidate,
)
from .highlight import HighlightConfig, correct_highlights, illumination_residue, log_radiance, median_log
from .image import (
    DegenerateImageError,
    ImageFormatError,
    load_image,
    save_image,
    to_gray,
    white_balance,
)
from .metrics import MetricsConfig, MetricsReport, cnr, new_edge_rate, psnr, report, ssim
from .pipeline import ConfigError, PipelineConfig, StageError, parse_config, run_pipeline
from .recovery import RecoveryConfig, recover
from .saf import SafConfig, refine_transmission, saf_filter
from .synth import HazeSynthesisParams, depth_ramp_transmission, synthesize
from .transmission import TransmissionConfig, dark_channel, rough_transmission

__version__ = "0.1.0"

"""End-to-end dehazing pipeline and its flat key=value configuration."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import image as im
from .airlight import AirlightConfig, AtmosphericLight, Region, estimate_airlight_details
from .highlight import HighlightConfig, correct_highlights
from .metrics import MetricsConfig
from .recovery import RecoveryConfig, recover
from .saf import SafConfig, refine_transmission
from .transmission import TransmissionConfig, dark_channel, rough_transmission


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    highlight: HighlightConfig = field(default_factory=HighlightConfig)
    airlight: AirlightConfig = field(default_factory=AirlightConfig)
    transmission: TransmissionConfig = field(default_factory=TransmissionConfig)
    saf: SafConfig = field(default_factory=SafConfig)
    recovery: RecoveryConfig = field(default_factory=RecoveryConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    airlight_override: AtmosphericLight | None = None
    suppress_highlights: bool = True
    dump_dir: Path | None = None


# flat key -> (section, field); sections are PipelineConfig attributes
KEYS = {
    "median_radius": ("highlight", "median_radius"),
    "lpf_cutoff": ("highlight", "butterworth_cutoff"),
    "lpf_order": ("highlight", "butterworth_order"),
    "log_floor": ("highlight", "log_floor"),
    "quadtree_min_side": ("airlight", "quadtree_min_side"),
    "patch_size": ("airlight", "patch_size"),
    "min_line_points": ("airlight", "min_line_points"),
    "vote_angle_tolerance": ("airlight", "vote_angle_tolerance"),
    "max_component": ("airlight", "max_component"),
    "patch_radius": ("transmission", "patch_radius"),
    "kappa": ("transmission", "kappa"),
    "t_min": ("transmission", "t_min"),
    "saf_radius": ("saf", "window_radius"),
    "saf_eps": ("saf", "epsilon_saf"),
    "epsilon": ("recovery", "epsilon"),
    "ssim_window": ("metrics", "ssim_window"),
    "ssim_k1": ("metrics", "ssim_k1"),
    "ssim_k2": ("metrics", "ssim_k2"),
    "edge_threshold": ("metrics", "edge_threshold"),
    "cnr_block": ("metrics", "cnr_block"),
}
INT_KEYS = {
    "median_radius", "lpf_order", "quadtree_min_side", "patch_size", "min_line_points",
    "patch_radius", "saf_radius", "ssim_window", "cnr_block",
}
TOP_LEVEL_KEYS = {"airlight", "suppress_highlights"}


def parse_airlight(text: str) -> AtmosphericLight:
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise ValueError(f"airlight needs three components r,g,b, got {text!r}")
    return AtmosphericLight.from_array([float(p) for p in parts])


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def convert_value(key: str, text: str):
    if key == "airlight":
        return parse_airlight(text)
    if key == "suppress_highlights":
        return _parse_bool(text)
    if key in INT_KEYS:
        return int(text)
    return float(text)


def read_config_file(path) -> dict:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    values = {}
    unknown = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, text = (s.strip() for s in line.split("=", 1))
            if key not in KEYS and key not in TOP_LEVEL_KEYS:
                unknown.append(key)
                continue
            try:
                values[key] = convert_value(key, text)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    if unknown:
        raise ConfigError(f"{path}: unknown keys: {', '.join(unknown)}")
    return values


def build_config(values: dict, dump_dir=None) -> PipelineConfig:
    """Assemble a validated config from flat key values over the defaults."""
    unknown = sorted(set(values) - set(KEYS) - TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    base = PipelineConfig()
    sections = {}
    for section in ("highlight", "airlight", "transmission", "saf", "recovery", "metrics"):
        kwargs = {f: values[k] for k, (s, f) in KEYS.items() if s == section and k in values}
        try:
            sections[section] = dataclasses.replace(getattr(base, section), **kwargs)
        except ValueError as exc:
            raise ConfigError(f"invalid {section} configuration: {exc}") from None
    return PipelineConfig(
        **sections,
        airlight_override=values.get("airlight"),
        suppress_highlights=values.get("suppress_highlights", True),
        dump_dir=Path(dump_dir) if dump_dir is not None else None,
    )


def parse_config(path=None, overrides: dict | None = None, dump_dir=None) -> PipelineConfig:
    """Defaults < config file < explicit overrides."""
    values = read_config_file(path) if path is not None else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(values, dump_dir=dump_dir)


@dataclass
class PipelineResult:
    dehazed: np.ndarray
    airlight: AtmosphericLight
    region: Region | None = None
    intermediates: dict = field(default_factory=dict)


def run_stage(name, fn, *args, **kwargs):
    """Call ``fn``, tagging any failure with the stage ``name``."""
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise StageError(name, exc) from exc


def airlight_sidecar(a: AtmosphericLight, region: Region | None) -> str:
    lines = [f"A {a.r:.6f} {a.g:.6f} {a.b:.6f}"]
    if region is not None:
        lines.append(f"region {region.x} {region.y} {region.w} {region.h}")
    return "\n".join(lines) + "\n"


def run_pipeline(img: np.ndarray, cfg: PipelineConfig = PipelineConfig(),
                 transmission: np.ndarray | None = None) -> PipelineResult:
    """Dehaze ``img``.

    Stage order: white balance, highlight correction (airlight search only),
    airlight, dark channel on the input, rough transmission, SAF refinement
    guided by the white-balanced image, recovery on the input. A supplied
    ``transmission`` map replaces the three transmission stages.
    """
    img = run_stage("load", im.as_rgb, img)
    gains = run_stage("white_balance", im.gray_world_gains, img)
    wb = np.clip(img * gains, 0.0, 1.0)
    inter = {"wb": wb}

    region = None
    if cfg.airlight_override is not None:
        a = cfg.airlight_override
    else:
        # the search sees the balanced, highlight-corrected image; A itself is
        # measured on the input because recovery runs on the input
        est = run_stage("airlight", estimate_airlight_details, img, cfg.highlight, cfg.airlight,
                        search_img=wb, suppress_highlights=cfg.suppress_highlights)
        a, region = est.airlight, est.region
        if cfg.dump_dir is not None and cfg.suppress_highlights:
            inter["highlight_corrected"] = run_stage("highlight", correct_highlights, wb, cfg.highlight)

    if transmission is not None:
        t = run_stage("transmission", im.as_map, transmission)
        run_stage("transmission", im.check_same_size, img, t)
    else:
        dark = run_stage("dark_channel", dark_channel, img, cfg.transmission)
        rough = run_stage("rough_transmission", rough_transmission, dark, cfg.transmission)
        t = run_stage("saf", refine_transmission, rough, wb, cfg.saf)
        inter.update(dark_channel=dark, t_rough=rough, t_refined=t)

    out = run_stage("recovery", recover, img, t, a, cfg.recovery)
    result = PipelineResult(out, a, region, inter)
    if cfg.dump_dir is not None:
        run_stage("dump", write_dumps, result, cfg.dump_dir)
    return result


def write_dumps(result: PipelineResult, directory) -> None:
    directory = im.ensure_dir(directory)
    inter = result.intermediates
    for name in ("wb", "highlight_corrected"):
        if name in inter:
            im.save_image(inter[name], directory / f"{name}.png")
    for name in ("dark_channel", "t_rough", "t_refined"):
        if name in inter:
            im.save_map(inter[name], directory / f"{name}.png")
    (directory / "airlight.txt").write_text(airlight_sidecar(result.airlight, result.region), encoding="utf-8")

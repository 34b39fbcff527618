"""Command-line front end: ``dehaze run | synth | metrics``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import image as im
from .metrics import report
from .pipeline import (
    INT_KEYS,
    KEYS,
    ConfigError,
    StageError,
    airlight_sidecar,
    parse_airlight,
    parse_config,
    run_pipeline,
    run_stage,
)
from .synth import HazeSynthesisParams, depth_ramp_transmission, format_sidecar, synthesize


def _add_knobs(p: argparse.ArgumentParser) -> None:
    group = p.add_argument_group("pipeline parameters (override --config)")
    for key in KEYS:
        group.add_argument("--" + key.replace("_", "-"), dest=key, type=int if key in INT_KEYS else float,
                           default=None, metavar="N" if key in INT_KEYS else "X")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dehaze", description="Single-image haze removal")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="dehaze one or more images")
    run.add_argument("inputs", nargs="+", type=Path)
    run.add_argument("-o", "--output", required=True, type=Path,
                     help="output PNG, or a directory when several inputs are given")
    run.add_argument("--config", type=Path)
    run.add_argument("--airlight", type=parse_airlight, help="fixed airlight r,g,b; skips estimation")
    run.add_argument("--transmission-map", type=Path, help="use this transmission map (.npy or grayscale PNG)")
    run.add_argument("--no-highlight-correction", dest="suppress_highlights", action="store_false", default=None,
                     help="search for the airlight on the uncorrected image")
    run.add_argument("--dump", type=Path, help="write all intermediates to this directory")
    run.add_argument("--dump-transmission", type=Path, help="write t_rough.png and t_refined.png here")
    run.add_argument("--dump-airlight", type=Path, help="write the airlight sidecar to this file")
    run.add_argument("--reference", type=Path, help="clear reference image for SSIM/PSNR")
    run.add_argument("--report-out", type=Path, help="write the metrics report here")
    run.add_argument("--jobs", type=int, default=1)
    _add_knobs(run)

    syn = sub.add_parser("synth", help="add synthetic haze to a clear image")
    syn.add_argument("clear", type=Path)
    syn.add_argument("-o", "--output", required=True, type=Path)
    syn.add_argument("--airlight", required=True, type=parse_airlight)
    syn.add_argument("--t0", type=float)
    syn.add_argument("--beta", type=float)
    syn.add_argument("--depth-max", type=float)
    syn.add_argument("--sidecar", type=Path)

    met = sub.add_parser("metrics", help="score a restored image")
    met.add_argument("--hazy", required=True, type=Path)
    met.add_argument("--restored", required=True, type=Path)
    met.add_argument("--reference", type=Path)
    met.add_argument("--report-out", type=Path)
    _add_knobs(met)
    return parser


def _overrides(args) -> dict:
    values = {k: getattr(args, k) for k in KEYS}
    for key in ("airlight", "suppress_highlights"):
        values[key] = getattr(args, key, None)
    return values


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        _write_text(path, text)


def _run_one(src: Path, dst: Path, args, cfg) -> None:
    img = run_stage("load", im.load_image, src)
    t = run_stage("load", im.load_map, args.transmission_map) if args.transmission_map else None
    result = run_pipeline(img, cfg, transmission=t)
    run_stage("save", im.save_image, result.dehazed, dst)
    if args.dump_transmission is not None and "t_refined" in result.intermediates:
        run_stage("dump", _dump_transmission, result.intermediates, args.dump_transmission)
    if args.dump_airlight is not None:
        run_stage("dump", _write_text, args.dump_airlight, airlight_sidecar(result.airlight, result.region))
    if args.report_out is not None or args.reference is not None:
        ref = run_stage("load", im.load_image, args.reference) if args.reference else None
        text = run_stage("metrics", report, ref, img, result.dehazed, cfg.metrics).format()
        run_stage("report", _emit, text, args.report_out)


def _dump_transmission(inter: dict, directory: Path) -> None:
    d = im.ensure_dir(directory)
    im.save_map(inter["t_rough"], d / "t_rough.png")
    im.save_map(inter["t_refined"], d / "t_refined.png")


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def cmd_run(args) -> int:
    cfg = parse_config(args.config, _overrides(args), dump_dir=args.dump)
    if len(args.inputs) == 1:
        _run_one(args.inputs[0], args.output, args, cfg)
        return 0
    out_dir = im.ensure_dir(args.output)
    jobs = [(src, out_dir / (src.stem + ".png")) for src in args.inputs]
    with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
        for fut in [pool.submit(_run_one, src, dst, args, cfg) for src, dst in jobs]:
            fut.result()
    return 0


def cmd_synth(args) -> int:
    clear = run_stage("load", im.load_image, args.clear)
    h, w = clear.shape[:2]
    if args.t0 is not None:
        params = HazeSynthesisParams(args.airlight, t0=args.t0)
        sidecar = format_sidecar(args.airlight, t0=args.t0)
    elif args.beta is not None and args.depth_max is not None:
        t = depth_ramp_transmission(w, h, args.beta, args.depth_max)
        params = HazeSynthesisParams(args.airlight, transmission=t)
        sidecar = format_sidecar(args.airlight, beta=args.beta, depth_max=args.depth_max)
    else:
        raise ConfigError("synth needs --t0, or both --beta and --depth-max")
    hazy = run_stage("synth", synthesize, clear, params)
    run_stage("save", im.save_image, hazy, args.output)
    if args.sidecar is not None:
        run_stage("save", _write_text, args.sidecar, sidecar)
    return 0


def cmd_metrics(args) -> int:
    cfg = parse_config(None, _overrides(args))
    hazy = run_stage("load", im.load_image, args.hazy)
    restored = run_stage("load", im.load_image, args.restored)
    ref = run_stage("load", im.load_image, args.reference) if args.reference else None
    text = run_stage("metrics", report, ref, hazy, restored, cfg.metrics).format()
    run_stage("report", _emit, text, args.report_out)
    return 0


COMMANDS = {"run": cmd_run, "synth": cmd_synth, "metrics": cmd_metrics}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except StageError as exc:
        print(f"dehaze: stage {exc.stage} failed: {exc.cause}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        print(f"dehaze: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

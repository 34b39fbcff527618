"""Image containers, conversions and file I/O.

Images are float64 numpy arrays: ``(H, W, 3)`` RGB in [0, 1] and ``(H, W)``
scalar maps. Every public function returns a fresh array; inputs are never
modified in place.
"""

from __future__ import annotations

import os
from pathlib import Path

import cv2
import numpy as np

GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """The file is readable but not a supported image format."""


class DegenerateImageError(ValueError):
    """The image content makes the requested operation undefined."""


def as_rgb(img) -> np.ndarray:
    """Validate and return ``img`` as a clamped float64 (H, W, 3) array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite samples")
    return np.clip(arr, 0.0, 1.0)


def as_map(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a non-empty (H, W) map, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("map contains non-finite samples")
    return arr


def check_same_size(*arrays: np.ndarray) -> None:
    shapes = {a.shape[:2] for a in arrays}
    if len(shapes) > 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


def _sniff(head: bytes) -> str:
    if head.startswith(_PNG_MAGIC):
        return "PNG"
    if head[:2] == b"P6":
        return "PPM"
    if head[:2] in (b"P1", b"P2", b"P3", b"P4", b"P5"):
        return f"PNM {head[:2].decode()}"
    if head[:3] == b"\xff\xd8\xff":
        return "JPEG"
    if head[:4] in (b"II*\x00", b"MM\x00*"):
        return "TIFF"
    if head[:2] == b"BM":
        return "BMP"
    if head[:4] == b"RIFF":
        return "RIFF/WebP"
    return "unknown"


def _decode(data: bytes, path: Path) -> np.ndarray:
    buf = np.frombuffer(data, dtype=np.uint8)
    img = cv2.imdecode(buf, cv2.IMREAD_UNCHANGED)
    if img is None:
        raise OSError(f"cannot decode {path} (truncated or corrupt)")
    return img


def load_image(path) -> np.ndarray:
    """Read an 8/16-bit PNG or binary PPM (P6) into a float RGB image.

    Samples are scaled linearly by 1/255 or 1/65535; no gamma decoding.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        data = fh.read()
    kind = _sniff(data[:16])
    if kind not in ("PNG", "PPM"):
        raise ImageFormatError(f"{path}: unsupported image format {kind}")
    raw = _decode(data, path)
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise ImageFormatError(f"{path}: unsupported sample type {raw.dtype}")
    if raw.ndim == 2:
        rgb = np.repeat(raw[..., None], 3, axis=2)
    elif raw.shape[2] == 1:
        rgb = np.repeat(raw, 3, axis=2)
    else:
        # OpenCV hands back BGR(A); alpha is dropped
        rgb = raw[..., 2::-1]
    return rgb.astype(np.float64) / scale


def load_map(path) -> np.ndarray:
    """Read a single-channel map from ``.npy`` or a grayscale PNG/PPM."""
    path = Path(path)
    if path.suffix.lower() == ".npy":
        return as_map(np.load(path))
    with open(path, "rb") as fh:
        data = fh.read()
    kind = _sniff(data[:16])
    if kind not in ("PNG", "PPM", "PNM P5"):
        raise ImageFormatError(f"{path}: unsupported map format {kind}")
    raw = _decode(data, path)
    scale = 65535.0 if raw.dtype == np.uint16 else 255.0
    if raw.ndim == 3:
        raw = raw[..., 0]
    return raw.astype(np.float64) / scale


def quantize(values: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to uint8, rounding half up."""
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def _write_png(path: Path, data: np.ndarray) -> None:
    if path.is_dir():
        raise IsADirectoryError(f"{path} is a directory")
    ok, buf = cv2.imencode(".png", data)
    if not ok:
        raise OSError(f"PNG encoding failed for {path}")
    with open(path, "wb") as fh:
        fh.write(buf.tobytes())


def save_image(img: np.ndarray, path) -> None:
    """Write an 8-bit RGB PNG."""
    img = as_rgb(img)
    _write_png(Path(path), quantize(img)[..., ::-1].copy())


def save_map(values: np.ndarray, path) -> None:
    """Write a scalar map in [0, 1] as an 8-bit grayscale PNG."""
    _write_png(Path(path), quantize(as_map(values)))


def to_gray(img: np.ndarray) -> np.ndarray:
    """Luma projection 0.299 r + 0.587 g + 0.114 b."""
    img = np.asarray(img, dtype=np.float64)
    return img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114


def gray_world_gains(img: np.ndarray) -> np.ndarray:
    """Per-channel gains that equalize each channel mean to the global mean."""
    img = np.asarray(img, dtype=np.float64)
    means = img.reshape(-1, 3).mean(axis=0)
    if np.any(means <= 0.0):
        raise DegenerateImageError("white balance needs a nonzero mean in every channel")
    return means.mean() / means


def white_balance(img: np.ndarray) -> np.ndarray:
    """Gray-world white balance, clamped to [0, 1]."""
    img = as_rgb(img)
    return np.clip(img * gray_world_gains(img), 0.0, 1.0)


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path

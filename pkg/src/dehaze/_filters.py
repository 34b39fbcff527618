"""Sliding-window primitives with truncated (not padded) borders."""

from __future__ import annotations

import numpy as np
from scipy import ndimage


def _box_sum_1d(a: np.ndarray, r: int, axis: int) -> np.ndarray:
    n = a.shape[axis]
    a = np.moveaxis(a, axis, 0)
    c = np.cumsum(a, axis=0)
    c = np.concatenate([np.zeros_like(c[:1]), c], axis=0)
    idx = np.arange(n)
    hi = np.minimum(idx + r + 1, n)
    lo = np.maximum(idx - r, 0)
    out = c[hi] - c[lo]
    return np.moveaxis(out, 0, axis)


def box_sum(a: np.ndarray, r: int) -> np.ndarray:
    """Sum over the (2r+1)x(2r+1) window around each pixel, truncated at borders."""
    a = np.asarray(a, dtype=np.float64)
    if r <= 0:
        return a.copy()
    return _box_sum_1d(_box_sum_1d(a, r, 0), r, 1)


def window_count(shape: tuple[int, int], r: int) -> np.ndarray:
    """Number of in-image pixels in each truncated window."""
    h, w = shape
    rows = np.minimum(np.arange(h) + r, h - 1) - np.maximum(np.arange(h) - r, 0) + 1
    cols = np.minimum(np.arange(w) + r, w - 1) - np.maximum(np.arange(w) - r, 0) + 1
    return np.outer(rows, cols).astype(np.float64)


def box_mean(a: np.ndarray, r: int) -> np.ndarray:
    return box_sum(a, r) / window_count(np.shape(a)[:2], r)


def _min_1d(a: np.ndarray, r: int, axis: int) -> np.ndarray:
    # van Herk / Gil-Werman: block prefix and suffix minima, three comparisons per sample
    if r <= 0:
        return a.copy()
    k = 2 * r + 1
    a = np.moveaxis(a, axis, -1)
    n = a.shape[-1]
    nblocks = -(-(n + 2 * r) // k)
    padded = np.full(a.shape[:-1] + (nblocks * k,), np.inf)
    padded[..., r : r + n] = a
    blocks = padded.reshape(a.shape[:-1] + (nblocks, k))
    prefix = np.minimum.accumulate(blocks, axis=-1).reshape(padded.shape)
    suffix = np.minimum.accumulate(blocks[..., ::-1], axis=-1)[..., ::-1].reshape(padded.shape)
    # window [i, i+k-1] in padded coordinates covers output sample i
    out = np.minimum(suffix[..., :n], prefix[..., k - 1 : k - 1 + n])
    return np.moveaxis(out, -1, axis)


def min_filter(a: np.ndarray, r: int) -> np.ndarray:
    """Windowed minimum over a (2r+1)^2 square, truncated at borders."""
    a = np.asarray(a, dtype=np.float64)
    return _min_1d(_min_1d(a, r, 0), r, 1)


def median_filter(a: np.ndarray, r: int) -> np.ndarray:
    """Windowed median over a (2r+1)^2 square, truncated at borders.

    Even-sized border windows take the lower of the two middle order
    statistics, so the result is always a sample of the input.
    """
    a = np.asarray(a, dtype=np.float64)
    h, w = a.shape
    if r <= 0:
        return a.copy()
    k = 2 * r + 1
    # full windows in the interior are odd-sized; scipy's padding never reaches them
    out = ndimage.median_filter(a, size=k, mode="nearest")
    padded = np.full((h + 2 * r, w + 2 * r), np.nan)
    padded[r : r + h, r : r + w] = a

    def fix(rows: slice, cols: slice) -> None:
        r0, r1, _ = rows.indices(h)
        c0, c1, _ = cols.indices(w)
        if r1 <= r0 or c1 <= c0:
            return
        sub = padded[r0 : r1 + 2 * r, c0 : c1 + 2 * r]
        win = np.lib.stride_tricks.sliding_window_view(sub, (k, k))
        win = np.sort(win.reshape(win.shape[0], win.shape[1], k * k), axis=-1)
        n = np.count_nonzero(~np.isnan(win), axis=-1)
        pick = (n - 1) // 2
        out[r0:r1, c0:c1] = np.take_along_axis(win, pick[..., None], axis=-1)[..., 0]

    fix(slice(0, min(r, h)), slice(0, w))
    fix(slice(max(h - r, 0), h), slice(0, w))
    fix(slice(0, h), slice(0, min(r, w)))
    fix(slice(0, h), slice(max(w - r, 0), w))
    return out

"""Image pyramids: Gaussian, Laplacian, min and max, plus the log-domain
fractional-level sampling and bicubic upsampling used by the parameter
estimators.

Gaussian levels use the classic 5-tap binomial [1 4 6 4 1]/16 with mirrored
boundaries; each level halves the previous one (rounded up).  Laplacian level
l is gaussian_l minus the upsampled gaussian_{l+1}, with the deepest level
kept as the low-pass residual so the pyramid collapses back to the source
exactly.  Min/max pyramids reduce 2x2 blocks per level, so level l summarizes
a 2^l x 2^l neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import convolve1d

PYRAMID_KINDS = ("gaussian", "laplacian", "min", "max")

_BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

# Log-of-zero guard for the fractional-level interpolation.
LOG_EPS = 1e-8


@dataclass(frozen=True)
class Pyramid:
    levels: list
    kind: str

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def source_shape(self) -> tuple[int, int]:
        return self.levels[0].shape


def level_to_frequency(level):
    """Central frequency (cycles/px) carried by a Laplacian level: 2^-(l+0.5)."""
    return 2.0 ** (-(np.asarray(level, dtype=np.float64) + 0.5))


def frequency_to_level(freq_cpp):
    """Inverse of level_to_frequency."""
    return -np.log2(np.asarray(freq_cpp, dtype=np.float64)) - 0.5


def default_depth(shape: tuple[int, int], max_depth: int = 6) -> int:
    """Depth that keeps the deepest band below any usable noise frequency;
    6 levels at 4K, automatically shallower for small images."""
    return int(min(max_depth, np.floor(np.log2(min(shape[:2]))) + 1))


def _smooth(img: np.ndarray) -> np.ndarray:
    out = convolve1d(img, _BINOMIAL5, axis=0, mode="reflect")
    return convolve1d(out, _BINOMIAL5, axis=1, mode="reflect")


def _decimate(img: np.ndarray) -> np.ndarray:
    return img[::2, ::2]


def _pyr_upsample(img: np.ndarray, target_shape: tuple[int, int]) -> np.ndarray:
    """Zero-insert then smooth with the doubled kernel; crop to target.

    The filtered sample-position mask renormalizes the boundary taps, so a
    constant image upsamples to the same constant everywhere.
    """
    h, w = img.shape
    th, tw = target_shape
    up = np.zeros((2 * h, 2 * w), dtype=np.float64)
    up[::2, ::2] = img
    mask = np.zeros((2 * h, 2 * w), dtype=np.float64)
    mask[::2, ::2] = 1.0
    for axis in (0, 1):
        up = convolve1d(up, 2.0 * _BINOMIAL5, axis=axis, mode="reflect")
        mask = convolve1d(mask, 2.0 * _BINOMIAL5, axis=axis, mode="reflect")
    return (up / mask)[:th, :tw]


def _block_reduce(img: np.ndarray, op) -> np.ndarray:
    h, w = img.shape
    if h % 2 or w % 2:
        img = np.pad(img, ((0, h % 2), (0, w % 2)), mode="edge")
    return op(op(img[0::2, 0::2], img[0::2, 1::2]),
              op(img[1::2, 0::2], img[1::2, 1::2]))


def build_pyramid(img: np.ndarray, kind: str, levels: int) -> Pyramid:
    if kind not in PYRAMID_KINDS:
        raise ValueError(f"unknown pyramid kind {kind!r}")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("pyramids operate on single-channel images")
    if min(img.shape) < 2 ** (levels - 1):
        raise ValueError(
            f"image {img.shape} too small for a {levels}-level pyramid")

    if kind in ("min", "max"):
        op = np.minimum if kind == "min" else np.maximum
        out = [img]
        for _ in range(levels - 1):
            out.append(_block_reduce(out[-1], op))
        return Pyramid(out, kind)

    gauss = [img]
    for _ in range(levels - 1):
        gauss.append(_decimate(_smooth(gauss[-1])))
    if kind == "gaussian":
        return Pyramid(gauss, kind)

    lap = [gauss[l] - _pyr_upsample(gauss[l + 1], gauss[l].shape)
           for l in range(levels - 1)]
    lap.append(gauss[-1])  # low-pass residual makes the collapse exact
    return Pyramid(lap, kind)


def reconstruct_laplacian(pyr: Pyramid) -> np.ndarray:
    if pyr.kind != "laplacian":
        raise ValueError("reconstruction needs a laplacian pyramid")
    acc = pyr.levels[-1]
    for lvl in reversed(pyr.levels[:-1]):
        acc = lvl + _pyr_upsample(acc, lvl.shape)
    return acc


def _bilinear_gather(img: np.ndarray, xs, ys):
    h, w = img.shape
    xc = np.clip(np.asarray(xs, dtype=np.float64), 0, w - 1)
    yc = np.clip(np.asarray(ys, dtype=np.float64), 0, h - 1)
    x0 = np.floor(xc).astype(np.intp)
    y0 = np.floor(yc).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def _to_level_coords(xs, ys, level: int):
    scale = 2.0 ** level
    return ((np.asarray(xs, dtype=np.float64) + 0.5) / scale - 0.5,
            (np.asarray(ys, dtype=np.float64) + 0.5) / scale - 0.5)


def sample_laplacian_log(pyr: Pyramid, x, y, level):
    """|Laplacian| at full-resolution coords (x, y) and fractional level.

    Bilinear within each level, linear between the two bracketing levels in
    the log domain (geometric interpolation of magnitudes); falls back to
    plain linear interpolation when either magnitude is below LOG_EPS.
    Accepts scalars or matching arrays; level must lie in [0, depth-1].
    """
    if pyr.kind != "laplacian":
        raise ValueError("log sampling needs a laplacian pyramid")
    lvl = np.asarray(level, dtype=np.float64)
    if (lvl < 0).any() or (lvl > pyr.depth - 1).any():
        raise ValueError("level out of range")
    scalar = np.isscalar(level) or lvl.ndim == 0

    xs = np.broadcast_to(np.asarray(x, dtype=np.float64), np.shape(lvl) or (1,)).ravel()
    ys = np.broadcast_to(np.asarray(y, dtype=np.float64), np.shape(lvl) or (1,)).ravel()
    ls = np.atleast_1d(lvl).ravel()

    lo = np.floor(ls).astype(int)
    hi = np.minimum(lo + 1, pyr.depth - 1)
    t = ls - lo

    v_lo = np.empty_like(ls)
    v_hi = np.empty_like(ls)
    for k in np.unique(np.concatenate([lo, hi])):
        img_abs = np.abs(pyr.levels[k])
        for tgt, idx in ((v_lo, lo == k), (v_hi, hi == k)):
            if idx.any():
                lx, ly = _to_level_coords(xs[idx], ys[idx], int(k))
                tgt[idx] = _bilinear_gather(img_abs, lx, ly)

    safe = (v_lo >= LOG_EPS) & (v_hi >= LOG_EPS)
    out = np.where(
        safe,
        np.exp((1 - t) * np.log(np.maximum(v_lo, LOG_EPS))
               + t * np.log(np.maximum(v_hi, LOG_EPS))),
        (1 - t) * v_lo + t * v_hi)
    out = np.where(t == 0, v_lo, out)
    return float(out[0]) if scalar else out.reshape(np.shape(lvl))


def _catmull_rom_weights(t: np.ndarray):
    t2 = t * t
    t3 = t2 * t
    return (-0.5 * t3 + t2 - 0.5 * t,
            1.5 * t3 - 2.5 * t2 + 1.0,
            -1.5 * t3 + 2.0 * t2 + 0.5 * t,
            0.5 * t3 - 0.5 * t2)


def _upsample_axis0(img: np.ndarray, out_len: int) -> np.ndarray:
    n = img.shape[0]
    if out_len == n:
        return img
    # pad by linear extrapolation so straight ramps survive the boundary
    top = 2.0 * img[:1] - img[1:2]
    bot = 2.0 * img[-1:] - img[-2:-1]
    padded = np.concatenate([top, img, bot], axis=0)
    pos = np.arange(out_len, dtype=np.float64) * ((n - 1) / (out_len - 1))
    i0 = np.minimum(np.floor(pos).astype(np.intp), n - 2)
    t = pos - i0
    w0, w1, w2, w3 = _catmull_rom_weights(t)
    idx = i0 + 1  # shift for the pad row
    sl = (slice(None),) + (None,) * (img.ndim - 1)
    return (padded[idx - 1] * w0[sl] + padded[idx] * w1[sl]
            + padded[idx + 1] * w2[sl] + padded[idx + 2] * w3[sl])


def upsample_bicubic(img: np.ndarray, target_shape: tuple[int, int]) -> np.ndarray:
    """Catmull-Rom upsampling to target (H, W); exact at source samples.

    Uses corner-aligned coordinates, so source sample i maps to output
    position i*(out-1)/(in-1).  Downscaling is rejected.
    """
    img = np.asarray(img, dtype=np.float64)
    th, tw = target_shape
    if th < img.shape[0] or tw < img.shape[1]:
        raise ValueError("upsample_bicubic cannot downscale")
    if min(img.shape[0], img.shape[1]) < 2 and (th, tw) != img.shape[:2]:
        raise ValueError("source too small for bicubic interpolation")
    out = _upsample_axis0(img, th)
    out = np.swapaxes(_upsample_axis0(np.swapaxes(out, 0, 1), tw), 0, 1)
    return out


def save_level_png(pyr: Pyramid, level: int, path: str | Path) -> None:
    """Debug dump of one level as 16-bit PNG (signed bands centered at 0.5)."""
    import cv2

    img = pyr.levels[level]
    vis = 0.5 + 0.5 * img if pyr.kind == "laplacian" else img
    data = (np.clip(vis, 0.0, 1.0) * 65535.0 + 0.5).astype(np.uint16)
    if not cv2.imwrite(str(path), data):
        raise IOError(f"could not write {path}")

"""Spatially varying Gaussian blur, the foveation simulator core.

Every pixel gets its own normalized Gaussian kernel of radius ceil(3*sigma)
evaluated exactly (no level blending); pixels with sigma == 0 pass through
bit-identical.  A numba kernel does the per-pixel accumulation when numba is
importable (the tap count at 4K runs into the billions); the pure-numpy
radius-grouped gather below computes the identical sums otherwise.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

try:
    import numba
except ImportError:  # pragma: no cover - numpy path covers the semantics
    numba = None

KERNEL_TRUNCATE_SIGMAS = 3.0

_TAP_BUDGET = 4_000_000  # taps per gather chunk


def _validated(img, sigma_map):
    img = np.asarray(img, dtype=np.float64)
    sigma_map = np.asarray(sigma_map, dtype=np.float64)
    if sigma_map.shape != img.shape[:2]:
        raise ValueError("sigma map must match the image resolution")
    if (sigma_map < 0).any():
        raise ValueError("sigma must be >= 0")
    return img, sigma_map


if numba is not None:

    @numba.njit(parallel=True, cache=True)
    def _blur_kernel_numba(padded, inv2s2, radius, r_max, out):  # pragma: no cover
        h, w, c = out.shape
        for py in numba.prange(h):
            wtab = np.empty(2 * r_max + 1)
            for px in range(w):
                r = radius[py, px]
                if r == 0:
                    continue
                g = inv2s2[py, px]
                # the square-window kernel separates: w(dx,dy) = w1(dx)w1(dy),
                # so one 1-D exp table serves the whole window and the
                # normalizer is its squared sum
                s1 = 0.0
                for d in range(-r, r + 1):
                    wtab[d + r] = np.exp(-d * d * g)
                    s1 += wtab[d + r]
                for ch in range(c):
                    acc = 0.0
                    for dy in range(-r, r + 1):
                        row = 0.0
                        for dx in range(-r, r + 1):
                            row += wtab[dx + r] * padded[py + r_max + dy,
                                                         px + r_max + dx, ch]
                        acc += wtab[dy + r] * row
                    out[py, px, ch] = acc / (s1 * s1)


def _blur_numpy(planes, inv2s2, radius, r_max, out):
    padded = np.pad(planes, [(r_max, r_max), (r_max, r_max), (0, 0)],
                    mode="reflect")
    for r in np.unique(radius[radius > 0]):
        r = int(r)
        k = 2 * r + 1
        ys, xs = np.nonzero(radius == r)
        offs = np.arange(-r, r + 1, dtype=np.float64)
        d2 = offs[:, None] ** 2 + offs[None, :] ** 2
        windows = sliding_window_view(padded, (k, k), axis=(0, 1))
        chunk = max(1, _TAP_BUDGET // (k * k))
        for lo in range(0, ys.size, chunk):
            sel = slice(lo, lo + chunk)
            py, px = ys[sel], xs[sel]
            w = np.exp(-d2[None] * inv2s2[py, px][:, None, None])
            w /= w.sum(axis=(1, 2), keepdims=True)
            patches = windows[py + r_max - r, px + r_max - r]  # (n, C, k, k)
            out[py, px] = np.einsum("nkl,nckl->nc", w, patches)


def variable_gaussian_blur(img: np.ndarray, sigma_map: np.ndarray,
                           force_numpy: bool = False) -> np.ndarray:
    """Per-pixel Gaussian blur of an (H, W) or (H, W, C) image.

    Kernel at pixel p: square window of radius ceil(3*sigma(p)), weights
    exp(-(dx^2+dy^2) / (2 sigma(p)^2)), normalized; mirrored boundaries.
    """
    img, sigma_map = _validated(img, sigma_map)
    flat = img.ndim == 2
    planes = np.ascontiguousarray(img[..., None] if flat else img)
    out = planes.copy()

    radius = np.zeros(sigma_map.shape, dtype=np.int64)
    active = sigma_map > 0
    radius[active] = np.ceil(
        KERNEL_TRUNCATE_SIGMAS * sigma_map[active]).astype(np.int64)
    r_max = int(radius.max())
    if r_max == 0:
        return out[..., 0] if flat else out

    inv2s2 = np.zeros_like(sigma_map)
    inv2s2[active] = 0.5 / sigma_map[active] ** 2

    if numba is not None and not force_numpy:
        padded = np.pad(planes, [(r_max, r_max), (r_max, r_max), (0, 0)],
                        mode="reflect")
        _blur_kernel_numba(padded, inv2s2, radius, r_max, out)
    else:
        _blur_numpy(planes, inv2s2, radius, r_max, out)
    return out[..., 0] if flat else out

"""Per-location Gabor parameter estimation.

Frequency: a truncated log-normal centered between the band limits in log
frequency (cortical bandwidth is symmetric there), width scaled by s_f.
Amplitude: read the Laplacian band that carries the last frequencies to
survive the foveation blur, scale by s_k, then shrink to the head-room left
before the composite would clip.  Orientation: Sobel gradients on a coarse
Gaussian level, interpolated back up through a double-angle encoding so the
0/pi wrap cannot tear the field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import sobel

from .pyramids import (Pyramid, build_pyramid, sample_laplacian_log,
                       upsample_bicubic)

MAX_SAMPLE_TRIES = 64
ORIENTATION_PYRAMID_LEVEL = 3
CLIP_PYRAMID_LEVEL = 3


@dataclass(frozen=True)
class FrequencySpec:
    """Truncated log-normal over cycles/degree; fields may be arrays."""

    mu_n: np.ndarray      # ln(cycles/degree)
    sigma_n: np.ndarray   # ln-units
    f_high_trunc: np.ndarray  # cycles/degree
    empty: np.ndarray


def frequency_spec(f_low, f_high, s_f: float) -> FrequencySpec:
    """Distribution parameters from the band limits (cycles/degree).

    mu sits at the log-midpoint, sigma at s_f/2 times the half-range, so
    mu +/- 2*sigma spans the band at s_f = 1.  Marked empty where
    f_low >= f_high.  Non-positive limits are rejected.
    """
    f_low = np.asarray(f_low, dtype=np.float64)
    f_high = np.asarray(f_high, dtype=np.float64)
    if s_f < 0:
        raise ValueError("s_f must be >= 0")
    finite_lo = f_low[np.isfinite(f_low)]
    if (finite_lo <= 0).any() or (f_high <= 0).any():
        raise ValueError("frequency limits must be positive")

    empty = f_low >= f_high
    with np.errstate(invalid="ignore", over="ignore"):
        mu = 0.5 * (np.log(f_low) + np.log(f_high))
        sig = 0.5 * s_f * (mu - np.log(f_low))
    mu = np.where(np.isfinite(mu), mu, np.log(f_high))
    sig = np.where(np.isfinite(sig) & ~empty, sig, 0.0)
    if f_low.ndim == 0 and f_high.ndim == 0:
        return FrequencySpec(np.float64(mu), np.float64(sig),
                             np.float64(f_high), np.bool_(empty))
    return FrequencySpec(mu, sig, np.broadcast_to(f_high, mu.shape).copy(), empty)


def _rejection_sample(mu, sigma, f_high, draw_z, max_tries=MAX_SAMPLE_TRIES):
    """Vectorized rejection sampling of exp(mu + sigma*z) truncated to (0, f_high).

    draw_z(try_index, pending_mask) supplies the normal variates for the
    entries still pending at that round, so the draw source (a Generator or a
    counter-based hash) is the caller's choice.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), mu.shape)
    f_high = np.broadcast_to(np.asarray(f_high, dtype=np.float64), mu.shape)
    out = np.empty_like(mu)
    pending = np.ones(mu.shape, dtype=bool)
    for j in range(max_tries):
        if not pending.any():
            break
        z = draw_z(j, pending)
        with np.errstate(over="ignore"):
            f = np.exp(mu[pending] + sigma[pending] * z)
        ok = (f > 0) & (f < f_high[pending])
        sel = np.flatnonzero(pending)
        out[sel[ok]] = f[ok]
        pending[sel[ok]] = False
    if pending.any():
        out[pending] = np.minimum(np.exp(mu[pending]),
                                  np.nextafter(f_high[pending], 0.0))
    return out


def sample_frequency(spec: FrequencySpec, rng: np.random.Generator):
    """One frequency draw (cycles/degree) per spec entry; empty specs rejected.

    Resamples until the value lands in (0, f_high); after MAX_SAMPLE_TRIES
    failed rounds falls back to exp(mu_n) clamped below the truncation bound.
    Deterministic given the generator state.
    """
    empty = np.asarray(spec.empty)
    if empty.any():
        raise ValueError("cannot sample from an empty frequency spec")
    scalar = np.asarray(spec.mu_n).ndim == 0

    def draw(_try, pending):
        return rng.standard_normal(int(pending.sum()))

    out = _rejection_sample(spec.mu_n, spec.sigma_n, spec.f_high_trunc, draw)
    return float(out[0]) if scalar else out.reshape(np.shape(spec.mu_n))


def foveation_cutoff_cpp(sigma_px, a: float):
    """Highest frequency (cycles/px) that survives the blur above factor a."""
    sigma_px = np.asarray(sigma_px, dtype=np.float64)
    if (sigma_px <= 0).any():
        raise ValueError("sigma must be > 0 (the fovea carries no noise)")
    if not 0.0 < a < 1.0:
        raise ValueError("attenuation cutoff a must lie in (0, 1)")
    return np.sqrt(-np.log(a) / (np.pi * sigma_px))


def cutoff_level(sigma_px, a: float, depth: int | None = None):
    """Fractional Laplacian level whose central frequency matches the blur
    cut-off: log2(sqrt(-pi*sigma/ln a)) - 0.5, clamped to [0, depth-1]
    (upper clamp only when depth is given)."""
    sigma_px = np.asarray(sigma_px, dtype=np.float64)
    if (sigma_px <= 0).any():
        raise ValueError("sigma must be > 0 (the fovea carries no noise)")
    if not 0.0 < a < 1.0:
        raise ValueError("attenuation cutoff a must lie in (0, 1)")
    raw = np.log2(np.sqrt(-np.pi * sigma_px / np.log(a))) - 0.5
    out = np.maximum(raw, 0.0)
    if depth is not None:
        out = np.minimum(out, depth - 1)
    return float(out) if out.ndim == 0 else out


def amplitude_field(lap: Pyramid, sigma_map: np.ndarray, s_k: float,
                    a: float) -> np.ndarray:
    """Noise amplitude K per pixel: s_k times the |Laplacian| sampled at the
    blur cut-off level; zero wherever sigma is zero."""
    if lap.kind != "laplacian":
        raise ValueError("amplitude estimation needs a laplacian pyramid")
    sigma_map = np.asarray(sigma_map, dtype=np.float64)
    if sigma_map.shape != lap.source_shape:
        raise ValueError("sigma map must match the pyramid's source resolution")
    out = np.zeros_like(sigma_map)
    mask = sigma_map > 0
    if not mask.any():
        return out
    ys, xs = np.nonzero(mask)
    levels = cutoff_level(sigma_map[mask], a, depth=lap.depth)
    out[mask] = s_k * sample_laplacian_log(lap, xs, ys, levels)
    return out


def attenuate_for_clipping(amplitude: np.ndarray, base_img: np.ndarray,
                           level: int = CLIP_PYRAMID_LEVEL) -> np.ndarray:
    """Shrink amplitudes to the head-room of the compositing target.

    base_img is the display-encoded image the noise is added to, values in
    [0, 1]; either a single channel or an RGB frame (then the per-pixel
    channel min feeds the min pyramid and the channel max the max pyramid,
    since the extreme channel clips first).  Head-room at a pixel is
    min(1 - N_max, N_min) read from the level-`level` min/max pyramids.
    """
    amplitude = np.asarray(amplitude, dtype=np.float64)
    base_img = np.asarray(base_img, dtype=np.float64)
    if base_img.min() < 0.0 or base_img.max() > 1.0:
        raise ValueError("base image must be display-encoded in [0, 1]")
    if base_img.ndim == 3:
        lo_src = base_img.min(axis=2)
        hi_src = base_img.max(axis=2)
    else:
        lo_src = hi_src = base_img
    n_min = build_pyramid(lo_src, "min", level + 1).levels[level]
    n_max = build_pyramid(hi_src, "max", level + 1).levels[level]
    available = np.minimum(1.0 - n_max, n_min)

    h, w = amplitude.shape
    iy = np.arange(h) >> level
    ix = np.arange(w) >> level
    avail_full = available[np.ix_(iy, ix)]
    return np.minimum(amplitude, np.maximum(avail_full, 0.0))


def fold_orientation(omega):
    """Fold angles into [0, pi)."""
    return np.mod(omega, np.pi)


def orientation_field(foveated_lum: np.ndarray,
                      level: int = ORIENTATION_PYRAMID_LEVEL) -> np.ndarray:
    """Local gradient direction in [0, pi) at full resolution.

    Sobel on Gaussian level `level` for spatial/temporal smoothness, then
    bicubic interpolation of (cos 2w, sin 2w) back to full resolution and
    re-extraction, which sidesteps the wrap at 0/pi.  Zero-gradient pixels
    get w = 0 by the atan2 convention.
    """
    lum = np.asarray(foveated_lum, dtype=np.float64)
    coarse = build_pyramid(lum, "gaussian", level + 1).levels[level]
    gx = sobel(coarse, axis=1, mode="reflect")
    gy = sobel(coarse, axis=0, mode="reflect")
    omega = fold_orientation(np.arctan2(gy, gx))
    cos2 = upsample_bicubic(np.cos(2.0 * omega), lum.shape)
    sin2 = upsample_bicubic(np.sin(2.0 * omega), lum.shape)
    return fold_orientation(0.5 * np.arctan2(sin2, cos2))

"""End-to-end enhancement: simulate foveation, contrast-enhance, estimate the
noise parameter fields, synthesize the noise, and composite in display space.

The fovea (sigma == 0) is bit-preserved through every stage: the blur passes
those pixels through, the contrast step has a zero detail layer there, and
the synthesized noise is masked to zero before compositing so kernels of
impulses just outside the fovea cannot bleed in.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .acuity import AcuityLimits, noise_band, thibos_limits
from .blur import variable_gaussian_blur
from .config import EnhanceConfig
from .frames import Frame, srgb_decode, srgb_encode
from .gabor import GaborGrid, synthesize
from .geometry import ViewingSetup, deg_per_px_map, eccentricity_map, sigma_map
from .noiseparams import (FrequencySpec, amplitude_field,
                          attenuate_for_clipping, frequency_spec,
                          orientation_field)
from .pyramids import build_pyramid, default_depth

# unsharp gain per unit f_e, anchored so the calibrated midpoint f_e = 0.2
# applies the detail layer at unit gain
CONTRAST_GAIN_NORMALIZER = 5.0
MAX_CLIPPED_FRACTION = 0.05
_LUM_GUARD = 1e-6


class ClippingError(RuntimeError):
    """Composite clipped implausibly many pixels; the config is wrong."""


def resolve_sigma_map(setup: ViewingSetup, config: EnhanceConfig,
                      sigma: np.ndarray | None = None) -> np.ndarray:
    """The config's sigma map unless an imported one overrides it."""
    if sigma is None:
        return sigma_map(setup, config.blur_rate, config.fovea_radius)
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (setup.resolution_px[1], setup.resolution_px[0]):
        raise ValueError("imported sigma map must match the setup resolution")
    return sigma


def foveate(frame: Frame, sigma: np.ndarray) -> Frame:
    """Spatially varying Gaussian blur in linear RGB; sigma == 0 pixels are
    returned bit-identical."""
    still = sigma == 0
    if still.all():
        return Frame(frame.rgb.copy())
    blurred = srgb_encode(variable_gaussian_blur(srgb_decode(frame.rgb), sigma))
    blurred[still] = frame.rgb[still]
    return Frame(np.clip(blurred, 0.0, 1.0))


def contrast_enhance(frame: Frame, sigma: np.ndarray, f_e: float) -> Frame:
    """Unsharp masking with the foveation-matched blur.

    Detail layer D = lum - blur(lum, sigma) in linear luminance; the
    luminance gain lum'/lum rescales linear RGB so hue is preserved.
    """
    if f_e == 0.0:
        return Frame(frame.rgb.copy())
    lum = frame.linear_luminance
    detail = lum - variable_gaussian_blur(lum, sigma)
    target = lum + f_e * CONTRAST_GAIN_NORMALIZER * detail
    ratio = np.where(lum > _LUM_GUARD, target / np.maximum(lum, _LUM_GUARD), 1.0)
    out = srgb_encode(np.maximum(srgb_decode(frame.rgb) * ratio[..., None], 0.0))
    still = sigma == 0
    out[still] = frame.rgb[still]
    return Frame(np.clip(out, 0.0, 1.0))


@dataclass
class NoiseFields:
    spec: FrequencySpec
    amplitude: np.ndarray
    orientation: np.ndarray


def estimate_noise_fields(foveated: Frame, setup: ViewingSetup,
                          config: EnhanceConfig, sigma: np.ndarray,
                          limits: AcuityLimits | None = None) -> NoiseFields:
    """Per-pixel Gabor parameters from the raw foveated linear luminance."""
    limits = limits or AcuityLimits()
    lum = foveated.linear_luminance
    lap = build_pyramid(lum, "laplacian", default_depth(lum.shape))
    amplitude = amplitude_field(lap, sigma, config.s_k, config.a)
    orientation = orientation_field(lum)
    t_low, t_high = thibos_limits(limits, eccentricity_map(setup))
    f_low, f_high, _ = noise_band(t_low, t_high, sigma, deg_per_px_map(setup))
    spec = frequency_spec(f_low, f_high, config.s_f)
    return NoiseFields(spec, amplitude, orientation)


@dataclass
class EnhanceResult:
    frame: Frame
    clipped_fraction: float
    timings_ms: dict
    noise: np.ndarray | None = None


def enhance(frame: Frame, setup: ViewingSetup, config: EnhanceConfig, *,
            sigma: np.ndarray | None = None,
            limits: AcuityLimits | None = None,
            keep_noise: bool = False) -> EnhanceResult:
    """Full enhancement of an already-foveated frame.

    Contrast-enhances, estimates parameters from the raw foveated luminance,
    attenuates amplitudes against the contrast-enhanced frame's level-3
    min/max pyramids, synthesizes the noise, and adds it achromatically to
    the display-encoded channels.  Raises ClippingError when more than 5% of
    pixels clip (a config bug, not a content property).
    """
    if frame.rgb.shape[:2][::-1] != setup.resolution_px:
        raise ValueError("frame resolution must match the viewing setup")
    timings = {}

    t0 = time.perf_counter()
    sigma = resolve_sigma_map(setup, config, sigma)
    timings["sigma_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    enhanced = contrast_enhance(frame, sigma, config.f_e)
    timings["contrast_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    fields = estimate_noise_fields(frame, setup, config, sigma, limits)
    amplitude = attenuate_for_clipping(fields.amplitude, enhanced.rgb)
    timings["estimation_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    grid = GaborGrid(impulses_per_kernel=config.impulses_per_kernel,
                     seed=config.seed)
    noise = synthesize(grid, fields.spec, amplitude, fields.orientation, setup)
    noise[sigma == 0] = 0.0
    timings["synthesis_ms"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    out = enhanced.rgb + noise[..., None]
    clipped = float(((out < 0.0) | (out > 1.0)).any(axis=2).mean())
    result = Frame(np.clip(out, 0.0, 1.0))
    timings["composite_ms"] = (time.perf_counter() - t0) * 1e3
    timings["total_ms"] = sum(timings.values())

    if clipped > MAX_CLIPPED_FRACTION:
        raise ClippingError(
            f"{clipped:.1%} of pixels clipped after compositing; "
            "the configuration is implausible")
    return EnhanceResult(result, clipped, timings,
                         noise if keep_noise else None)


@dataclass
class SequenceJob:
    """A frame sequence enhanced under one seed and one gaze."""

    frames: list
    setup: ViewingSetup
    config: EnhanceConfig
    sigma: np.ndarray | None = None


def process_sequence(job: SequenceJob, threads: int = 1) -> list[EnhanceResult]:
    """Enhance every frame independently with the shared impulse set.

    Impulse positions depend only on (seed, grid), so all frames share them;
    output order matches input order regardless of thread count.
    """
    sigma = resolve_sigma_map(job.setup, job.config, job.sigma)

    def run(frame):
        return enhance(frame, job.setup, job.config, sigma=sigma)

    if threads <= 1:
        return [run(f) for f in job.frames]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, job.frames))

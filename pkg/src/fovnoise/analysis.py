"""Quantitative verification: eccentricity-ring band-energy spectra,
inter-frame SSIM as a temporal-coherence proxy, and sampling-rate ratios.

Band energies tile an iso-eccentricity ring with overlapping Hann-windowed
patches, average their power spectra radially, and integrate over a
frequency band converted to cycles/px with the degrees-per-pixel at each
patch center.  Power is normalized so the sum over all non-DC coefficients
equals the mean windowed power of the patch, which makes band energies over
a full partition of [0, Nyquist] add up to the total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from skimage.metrics import structural_similarity

from .frames import Frame
from .geometry import ViewingSetup, deg_per_px_at

PATCH_SIZE = 128
PATCH_OVERLAP = 0.5

# original-publication SSIM constants; the window is an 11x11 Gaussian
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_SIGMA = 1.5


@dataclass(frozen=True)
class Ring:
    center_deg: float
    width_deg: float


@dataclass(frozen=True)
class Band:
    f_lo_cpd: float
    f_hi_cpd: float

    def __post_init__(self):
        if not 0.0 <= self.f_lo_cpd < self.f_hi_cpd:
            raise ValueError("band edges must satisfy 0 <= lo < hi")


@dataclass
class BandReport:
    ring: Ring
    bands: list
    energies: dict  # label -> list of energies, one per band

    def __post_init__(self):
        edges = [(b.f_lo_cpd, b.f_hi_cpd) for b in self.bands]
        if edges != sorted(edges):
            raise ValueError("bands must be ordered")
        for (l0, h0), (l1, _) in zip(edges, edges[1:]):
            if l1 < h0:
                raise ValueError("bands must not overlap")
        for label, es in self.energies.items():
            if any(e < 0 for e in es):
                raise ValueError(f"negative energy for {label}")


def ring_patch_centers(setup: ViewingSetup, shape: tuple[int, int],
                       ring: Ring, patch: int = PATCH_SIZE) -> list:
    """Patch centers (x, y) along the iso-eccentricity circle, spaced for
    50% overlap, keeping each patch fully inside the image."""
    h, w = shape
    gx, gy = setup.gaze_px
    r_m = setup.viewing_distance_m * np.tan(np.radians(ring.center_deg))
    r_px = r_m / setup.mean_pitch_m
    if r_px <= 0:
        raise ValueError("ring must sit at positive eccentricity")
    half = patch // 2
    step = max(patch * (1.0 - PATCH_OVERLAP) / r_px, 1e-3)
    centers = []
    for theta in np.arange(0.0, 2 * np.pi, step):
        cx = gx + r_px * np.cos(theta)
        cy = gy + r_px * np.sin(theta)
        if half <= cx <= w - half and half <= cy <= h - half:
            centers.append((float(cx), float(cy)))
    if not centers:
        raise ValueError("ring lies outside the image for this setup")
    return centers


def _patch_power(img: np.ndarray, cx: float, cy: float, patch: int):
    half = patch // 2
    y0 = int(round(cy)) - half
    x0 = int(round(cx)) - half
    tile = img[y0:y0 + patch, x0:x0 + patch]
    win = np.outer(np.hanning(patch), np.hanning(patch))
    spec = np.fft.fft2((tile - tile.mean()) * win)
    power = np.abs(spec) ** 2 / tile.size ** 2
    power[0, 0] = 0.0
    return power


def _radial_freq(patch: int) -> np.ndarray:
    f = np.fft.fftfreq(patch)
    rad = np.hypot(*np.meshgrid(f, f))
    # corner coefficients (hypot > 0.5) fold into the top of the partition
    return np.minimum(rad, 0.5 - 1e-12)


def ring_band_energy(img_lum: np.ndarray, setup: ViewingSetup, ring: Ring,
                     band: Band, patch: int = PATCH_SIZE) -> float:
    """Mean windowed power inside the band (cycles/degree) over the ring."""
    img_lum = np.asarray(img_lum, dtype=np.float64)
    centers = ring_patch_centers(setup, img_lum.shape, ring, patch)
    rad = _radial_freq(patch)
    total = 0.0
    for cx, cy in centers:
        dpp = float(deg_per_px_at(setup, cx, cy))
        lo_cpp = band.f_lo_cpd * dpp
        hi_cpp = band.f_hi_cpd * dpp
        power = _patch_power(img_lum, cx, cy, patch)
        total += power[(rad >= lo_cpp) & (rad < hi_cpp)].sum()
    return total / len(centers)


def band_report(conditions: dict, setup: ViewingSetup, ring: Ring,
                bands: list, patch: int = PATCH_SIZE) -> BandReport:
    """Band energies for labeled luminance images over one ring."""
    energies = {
        label: [ring_band_energy(lum, setup, ring, band, patch)
                for band in bands]
        for label, lum in conditions.items()
    }
    return BandReport(ring, list(bands), energies)


def _as_luminance(frame) -> np.ndarray:
    if isinstance(frame, Frame):
        return frame.linear_luminance
    return np.asarray(frame, dtype=np.float64)


def interframe_ssim(frames) -> float:
    """Mean SSIM between consecutive frames' linear luminance."""
    lums = [_as_luminance(f) for f in frames]
    if len(lums) < 2:
        raise ValueError("need at least two frames")
    shape = lums[0].shape
    if any(l.shape != shape for l in lums):
        raise ValueError("frames must share one resolution")
    vals = [
        structural_similarity(
            a, b, data_range=1.0, gaussian_weights=True, sigma=SSIM_SIGMA,
            use_sample_covariance=False, K1=SSIM_K1, K2=SSIM_K2)
        for a, b in zip(lums, lums[1:])
    ]
    return float(np.mean(vals))


def nyquist_sampling_rate(sigma_px) -> np.ndarray:
    """Sampling rate matching a Gaussian cut-off of 2*sigma: 1/(4*sigma)."""
    sigma_px = np.asarray(sigma_px, dtype=np.float64)
    if (sigma_px <= 0).any():
        raise ValueError("sigma must be positive")
    return 1.0 / (4.0 * sigma_px)


def sampling_rate_ratio(blur_rate_1: float, blur_rate_2: float) -> float:
    """Net sampling-rate ratio between two foveation strengths.

    The net sampling rate scales with 1/sigma and sigma scales with the blur
    rate, so the ratio of net rates is the inverse ratio of blur rates.
    """
    if blur_rate_1 <= 0 or blur_rate_2 <= 0:
        raise ValueError("blur rates must be positive")
    return blur_rate_1 / blur_rate_2

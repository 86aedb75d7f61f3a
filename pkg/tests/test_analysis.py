import numpy as np
import pytest

from fovnoise.analysis import (Band, BandReport, Ring, band_report,
                               interframe_ssim, nyquist_sampling_rate,
                               ring_band_energy, ring_patch_centers,
                               sampling_rate_ratio)
from fovnoise.frames import Frame
from fovnoise.geometry import ViewingSetup, deg_per_px_at
from fovnoise.stimuli import power_law_texture


def ring_setup(n=768, fov_half_deg=25.0):
    w_m = 2 * 0.715 * np.tan(np.radians(fov_half_deg))
    return ViewingSetup((n, n), (w_m, w_m), 0.715, ((n - 1) / 2, (n - 1) / 2))


SETUP = ring_setup()
RING = Ring(15.0, 4.0)


def test_ring_centers_inside_image():
    centers = ring_patch_centers(SETUP, (768, 768), RING)
    assert len(centers) >= 4
    for cx, cy in centers:
        assert 64 <= cx <= 704 and 64 <= cy <= 704


def test_ring_outside_image_rejected():
    with pytest.raises(ValueError):
        ring_patch_centers(SETUP, (768, 768), Ring(40.0, 4.0))


def test_constant_image_zero_band_energy():
    img = np.full((768, 768), 0.5)
    e = ring_band_energy(img, SETUP, RING, Band(2.0, 8.0))
    assert e < 1e-20


def test_sinusoid_energy_lands_in_its_band():
    f0_cpp = 0.11
    ys, xs = np.mgrid[0:768, 0:768].astype(np.float64)
    img = 0.5 + 0.4 * np.sin(2 * np.pi * f0_cpp * xs)
    centers = ring_patch_centers(SETUP, (768, 768), RING)
    dpps = [deg_per_px_at(SETUP, cx, cy) for cx, cy in centers]
    f0_cpd = f0_cpp / np.mean(dpps)
    inside = Band(f0_cpd * 0.8, f0_cpd * 1.2)
    full = Band(1e-6, 0.5 / min(dpps))
    e_in = ring_band_energy(img, SETUP, RING, inside)
    e_all = ring_band_energy(img, SETUP, RING, full)
    assert e_in / e_all >= 0.90


def test_parseval_partition_within_two_percent():
    rng = np.random.default_rng(0)
    img = power_law_texture((768, 768), rng, beta=1.0)
    centers = ring_patch_centers(SETUP, (768, 768), RING)
    dpp_min = min(deg_per_px_at(SETUP, cx, cy) for cx, cy in centers)
    top = 0.5 / dpp_min  # covers Nyquist for every patch
    edges = np.linspace(0.0, top, 9)
    total_banded = sum(
        ring_band_energy(img, SETUP, RING, Band(max(lo, 1e-9), hi))
        for lo, hi in zip(edges[:-1], edges[1:]))

    # direct total: mean windowed non-DC power over the same patches
    win = np.outer(np.hanning(128), np.hanning(128))
    direct = 0.0
    for cx, cy in centers:
        tile = img[int(round(cy)) - 64:int(round(cy)) + 64,
                   int(round(cx)) - 64:int(round(cx)) + 64]
        spec = np.fft.fft2((tile - tile.mean()) * win)
        p = np.abs(spec) ** 2 / tile.size ** 2
        direct += p.sum() - p[0, 0]
    direct /= len(centers)
    assert total_banded == pytest.approx(direct, rel=0.02)


def test_band_report_shape_and_validation():
    img = np.full((768, 768), 0.5)
    rep = band_report({"reference": img, "foveated": img}, SETUP, RING,
                      [Band(2.0, 5.0), Band(5.0, 9.0)])
    assert set(rep.energies) == {"reference", "foveated"}
    assert len(rep.energies["reference"]) == 2
    with pytest.raises(ValueError):
        BandReport(RING, [Band(2.0, 6.0), Band(5.0, 9.0)],
                   {"a": [0.0, 0.0]})
    with pytest.raises(ValueError):
        BandReport(RING, [Band(2.0, 5.0)], {"a": [-1.0]})


def test_ssim_identical_frames():
    rng = np.random.default_rng(1)
    img = rng.random((96, 96))
    assert interframe_ssim([img, img.copy(), img.copy()]) == pytest.approx(1.0)


def test_ssim_inverted_frame_negative():
    rng = np.random.default_rng(2)
    img = 0.5 + 0.3 * (rng.random((96, 96)) - 0.5)
    assert interframe_ssim([img, 1.0 - img]) < 0.0


def test_ssim_symmetric_and_bounded():
    rng = np.random.default_rng(3)
    frames = [rng.random((64, 64)) for _ in range(4)]
    fwd = interframe_ssim(frames)
    rev = interframe_ssim(frames[::-1])
    assert fwd == pytest.approx(rev, abs=1e-12)
    assert -1.0 <= fwd <= 1.0


def test_ssim_accepts_frames_and_validates():
    f = Frame.from_gray(np.full((32, 32), 0.5))
    assert interframe_ssim([f, f]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        interframe_ssim([f])
    with pytest.raises(ValueError):
        interframe_ssim([np.zeros((8, 8)), np.zeros((9, 9))])


def test_sampling_rate_ratio():
    assert sampling_rate_ratio(0.3, 0.3) == 1.0
    assert sampling_rate_ratio(0.45, 0.68) == pytest.approx(0.6618, abs=1e-4)
    assert sampling_rate_ratio(0.4, 0.2) == pytest.approx(
        2.0 * sampling_rate_ratio(0.2, 0.2))
    with pytest.raises(ValueError):
        sampling_rate_ratio(0.0, 0.4)


def test_nyquist_sampling_rate():
    assert nyquist_sampling_rate(2.0) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        nyquist_sampling_rate(0.0)

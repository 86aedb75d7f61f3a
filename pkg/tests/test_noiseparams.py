import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.stats import norm

from fovnoise.config import EnhanceConfig, calibrated_constants
from fovnoise.noiseparams import (amplitude_field, attenuate_for_clipping,
                                  cutoff_level, fold_orientation,
                                  foveation_cutoff_cpp, frequency_spec,
                                  orientation_field, sample_frequency)
from fovnoise.pyramids import Pyramid, build_pyramid


# ---------------------------------------------------------------- frequency

def test_frequency_spec_closed_form():
    spec = frequency_spec(10.0, 40.0, s_f=1.0)
    assert spec.mu_n == pytest.approx(np.log(20.0), rel=1e-12)
    assert spec.mu_n == pytest.approx(2.9957, abs=1e-4)
    assert spec.sigma_n == pytest.approx(0.5 * np.log(2.0), rel=1e-12)
    assert spec.sigma_n == pytest.approx(0.3466, abs=1e-4)
    assert spec.f_high_trunc == 40.0
    assert not spec.empty


def test_frequency_spec_linear_in_sf():
    s1 = frequency_spec(10.0, 40.0, s_f=1.3)
    s2 = frequency_spec(10.0, 40.0, s_f=2.6)
    assert s2.sigma_n == pytest.approx(2.0 * s1.sigma_n, rel=1e-12)


def test_frequency_spec_degenerate_band():
    spec = frequency_spec(12.0, 12.0, s_f=1.0)
    assert spec.empty
    assert spec.mu_n == pytest.approx(np.log(12.0))
    assert spec.sigma_n == 0.0


def test_frequency_spec_rejects_nonpositive():
    with pytest.raises(ValueError):
        frequency_spec(0.0, 40.0, 1.0)
    with pytest.raises(ValueError):
        frequency_spec(10.0, -1.0, 1.0)


def test_sample_frequency_degenerate_sigma():
    spec = frequency_spec(10.0, 40.0, s_f=0.0)
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert sample_frequency(spec, rng) == pytest.approx(20.0, rel=1e-12)


def test_sample_frequency_truncation_contract():
    spec = frequency_spec(10.0, 40.0, s_f=1.0)
    rng = np.random.default_rng(1)
    samples = np.array([sample_frequency(spec, rng) for _ in range(2000)])
    assert (samples > 0).all() and (samples < 40.0).all()


def _truncated_ln_mean_quadrature(mu, sigma, f_high):
    """E[ln f] for ln f ~ N(mu, sigma^2) truncated above ln(f_high), by
    numeric integration over the standard normal."""
    alpha = (np.log(f_high) - mu) / sigma
    num, _ = quad(lambda z: (mu + sigma * z) * norm.pdf(z), -12.0, alpha)
    den, _ = quad(norm.pdf, -12.0, alpha)
    return num / den


def test_sample_frequency_matches_quadrature_oracle():
    spec = frequency_spec(10.0, 40.0, s_f=1.0)
    rng = np.random.default_rng(42)
    n = 100_000
    samples = sample_frequency(
        frequency_spec(np.full(n, 10.0), np.full(n, 40.0), 1.0), rng)
    expected = _truncated_ln_mean_quadrature(float(spec.mu_n),
                                             float(spec.sigma_n), 40.0)
    assert np.log(samples).mean() == pytest.approx(expected, rel=0.02)


def test_sample_frequency_empty_rejected():
    with pytest.raises(ValueError):
        sample_frequency(frequency_spec(12.0, 12.0, 1.0), np.random.default_rng(0))


# ------------------------------------------------------------- cutoff level

def test_cutoff_level_hand_values():
    a = 0.25
    sigma = 4.0 * np.log(4.0) / np.pi
    assert cutoff_level(sigma, a) == pytest.approx(0.5, abs=1e-12)
    sigma = np.log(4.0) / np.pi  # raw -0.5, clamped to 0
    assert cutoff_level(sigma, a) == 0.0


def test_cutoff_level_clamps_to_depth():
    assert cutoff_level(1e6, 0.25, depth=6) == 5.0


def test_cutoff_level_matches_bisection_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        sigma = rng.uniform(0.5, 20.0)
        a = rng.uniform(0.05, 0.9)
        f_c = np.sqrt(-np.log(a) / (np.pi * sigma))
        l_ref = brentq(lambda l: 2.0 ** (-(l + 0.5)) - f_c, -10.0, 30.0,
                       xtol=1e-12)
        closed = np.log2(np.sqrt(-np.pi * sigma / np.log(a))) - 0.5
        assert abs(closed - l_ref) < 1e-9
        assert cutoff_level(sigma, a) == pytest.approx(max(l_ref, 0.0), abs=1e-9)


def test_foveation_cutoff_matches_printed_form():
    assert foveation_cutoff_cpp(2.0, 0.25) == pytest.approx(
        np.sqrt(np.log(4.0) / (2.0 * np.pi)), rel=1e-12)


@given(st.floats(0.1, 50.0), st.floats(0.1, 50.0), st.floats(0.05, 0.9))
def test_cutoff_level_monotone_in_sigma(s1, s2, a):
    lo, hi = sorted((s1, s2))
    assert cutoff_level(lo, a) <= cutoff_level(hi, a) + 1e-12


def test_cutoff_level_rejects_fovea():
    with pytest.raises(ValueError):
        cutoff_level(0.0, 0.25)


# ---------------------------------------------------------------- amplitude

def test_amplitude_zero_on_flat_image():
    img = np.full((64, 64), 0.5)
    lap = build_pyramid(img, "laplacian", 4)
    sig = np.full((64, 64), 2.0)
    assert (amplitude_field(lap, sig, s_k=22.4, a=0.25) <= 1e-6 * 22.4).all()


def test_amplitude_reads_cutoff_level_band():
    # sigma chosen so l_a = 1 exactly: sigma = 8 ln(4)/pi
    sigma = 8.0 * np.log(4.0) / np.pi
    levels = [np.full((32, 32), 0.5), np.full((16, 16), 0.01),
              np.full((8, 8), 0.5)]
    lap = Pyramid(levels, "laplacian")
    sig_map = np.full((32, 32), sigma)
    out = amplitude_field(lap, sig_map, s_k=22.4, a=0.25)
    assert out[16, 16] == pytest.approx(0.224, rel=1e-9)


def test_amplitude_zero_where_sigma_zero():
    img = np.random.default_rng(0).random((64, 64))
    lap = build_pyramid(img, "laplacian", 4)
    sig = np.full((64, 64), 3.0)
    sig[:32] = 0.0
    out = amplitude_field(lap, sig, s_k=20.0, a=0.25)
    assert (out[:32] == 0.0).all()
    assert (out[32:] >= 0.0).all()


def test_amplitude_linear_in_sk():
    img = np.random.default_rng(1).random((64, 64))
    lap = build_pyramid(img, "laplacian", 4)
    sig = np.full((64, 64), 3.0)
    k1 = amplitude_field(lap, sig, s_k=10.0, a=0.25)
    k2 = amplitude_field(lap, sig, s_k=20.0, a=0.25)
    assert np.allclose(k2, 2.0 * k1, rtol=1e-12)


# ----------------------------------------------------------------- clipping

def test_clipping_midgray_untouched():
    base = np.full((32, 32), 0.5)
    k = np.full((32, 32), 0.3)
    assert np.allclose(attenuate_for_clipping(k, base), 0.3)


def test_clipping_limited_headroom():
    base = np.full((32, 32), 0.2)
    base[::2, ::2] = 0.9  # every level-3 cell sees max 0.9, min 0.2
    k = np.full((32, 32), 0.3)
    out = attenuate_for_clipping(k, base)
    assert np.allclose(out, 0.1)


def test_clipping_no_room_at_extremes():
    base = np.full((32, 32), 0.5)
    base[0, 0] = 0.0
    k = np.full((32, 32), 0.3)
    out = attenuate_for_clipping(k, base)
    assert (out[:8, :8] == 0.0).all()  # the cell containing the black pixel
    base2 = np.full((32, 32), 0.5)
    base2[-1, -1] = 1.0
    out2 = attenuate_for_clipping(k, base2)
    assert (out2[-8:, -8:] == 0.0).all()


def test_clipping_rgb_uses_extreme_channels():
    base = np.full((16, 16, 3), 0.5)
    base[..., 2] = 0.95  # blue near the top: headroom 0.05
    out = attenuate_for_clipping(np.full((16, 16), 0.3), base)
    assert np.allclose(out, 0.05)


def test_clipping_never_exceeds_input_or_headroom():
    rng = np.random.default_rng(5)
    base = rng.random((64, 64))
    k = rng.random((64, 64)) * 0.8
    out = attenuate_for_clipping(k, base)
    assert (out <= k + 1e-15).all()
    assert (out >= 0.0).all()


def test_clipping_rejects_out_of_range_base():
    with pytest.raises(ValueError):
        attenuate_for_clipping(np.zeros((8, 8)), np.full((8, 8), 1.5))


# -------------------------------------------------------------- orientation

def test_orientation_vertical_edge():
    img = np.zeros((64, 64))
    img[:, 32:] = 1.0  # vertical step: gradient along +x
    omega = orientation_field(img)
    band = omega[:, 24:40]
    folded = np.minimum(band, np.pi - band)
    assert folded.max() < 0.05


def test_orientation_diagonal_ramp():
    ys, xs = np.mgrid[0:64, 0:64].astype(np.float64)
    img = (xs + ys) / 128.0
    omega = orientation_field(img)
    assert np.abs(omega[16:-16, 16:-16] - np.pi / 4).max() < 0.02


def test_orientation_constant_image_is_zero():
    omega = orientation_field(np.full((64, 64), 0.3))
    assert (omega == 0.0).all()


@settings(max_examples=200)
@given(st.floats(0.0, np.pi, exclude_max=True))
def test_double_angle_roundtrip(omega):
    c, s = np.cos(2 * omega), np.sin(2 * omega)
    back = fold_orientation(0.5 * np.arctan2(s, c))
    assert min(abs(back - omega), np.pi - abs(back - omega)) < 1e-6


# -------------------------------------------------------------------- config

def test_table_defaults_exact_rows():
    assert calibrated_constants(0.11) == (0.15, 22.4, 3.45)
    assert calibrated_constants(0.34) == (0.23, 21.02, 2.21)
    assert calibrated_constants(0.57) == (0.28, 18.68, 2.19)


def test_constants_interpolated_and_clamped():
    f_e, s_k, s_f = calibrated_constants(0.225)  # midpoint of 0.11 and 0.34
    assert f_e == pytest.approx(0.19)
    assert s_k == pytest.approx(21.71)
    assert s_f == pytest.approx(2.83)
    assert calibrated_constants(0.05) == (0.15, 22.4, 3.45)
    assert calibrated_constants(0.9) == (0.28, 18.68, 2.19)


def test_config_validation_and_json(tmp_path):
    cfg = EnhanceConfig.for_blur_rate(0.57)
    assert (cfg.f_e, cfg.s_k, cfg.s_f) == (0.28, 18.68, 2.19)
    path = tmp_path / "cfg.json"
    cfg.to_json(path)
    assert EnhanceConfig.from_json(path) == cfg
    with pytest.raises(ValueError):
        EnhanceConfig(0.3, f_e=0.5, s_k=10.0, s_f=1.0)
    with pytest.raises(ValueError):
        EnhanceConfig(0.3, f_e=0.2, s_k=50.0, s_f=1.0)
    with pytest.raises(ValueError):
        EnhanceConfig(0.3, f_e=0.2, s_k=10.0, s_f=0.0)
    with pytest.raises(ValueError):
        EnhanceConfig(0.3, f_e=0.2, s_k=10.0, s_f=1.0, a=1.0)
    with pytest.raises(ValueError):
        EnhanceConfig(0.3, f_e=0.2, s_k=10.0, s_f=1.0, impulses_per_kernel=0)

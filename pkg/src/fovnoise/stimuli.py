"""Synthetic stimuli: a small corpus with natural-like spectra for
calibration-style runs, and a panning sequence for temporal coherence checks.

Natural images carry roughly 1/f amplitude spectra, which is exactly the
correlation between low and high frequency content the amplitude estimator
leans on, so the corpus is built from random-phase power-law textures plus
hard structure (edges, gratings) and spans dark and bright scenes.
"""

from __future__ import annotations

import numpy as np

from .frames import Frame


def power_law_texture(shape: tuple[int, int], rng: np.random.Generator,
                      beta: float = 1.2) -> np.ndarray:
    """Random-phase texture with a 1/f^beta amplitude spectrum, in [0, 1]."""
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    rad = np.hypot(fy, fx)
    rad[0, 0] = 1.0
    amp = rad ** -beta
    amp[0, 0] = 0.0
    phase = rng.uniform(0, 2 * np.pi, (h, w))
    field = np.fft.ifft2(amp * np.exp(1j * phase)).real
    field -= field.mean()
    scale = 3.0 * field.std()
    return np.clip(0.5 + 0.5 * field / scale, 0.0, 1.0)


def _checker(shape, period):
    ys, xs = np.mgrid[0:shape[0], 0:shape[1]]
    return (((ys // period) + (xs // period)) % 2).astype(np.float64)


def make_corpus(size: tuple[int, int] = (768, 768), seed: int = 0,
                n: int = 5) -> list[Frame]:
    """Deterministic corpus of n display-encoded RGB frames.

    Every scene carries genuine fine detail (broadband grain, shallow
    spectra, fine gratings) next to its smooth shading, spanning dark and
    bright recipes, so there is real reference energy in the detectable but
    not resolvable band at peripheral rings.
    """
    w, h = size
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)

    def grating(f1, f2):
        return (0.09 * np.sin(2 * np.pi * f1 * xs + 3 * np.sin(0.01 * ys))
                + 0.07 * np.sin(2 * np.pi * f2 * (xs + ys) / np.sqrt(2.0)))

    gratings = [grating(0.34, 0.42), grating(0.38, 0.45), grating(0.32, 0.44)]

    def recipe(i: int) -> np.ndarray:
        tex = power_law_texture((h, w), rng, beta=(1.1, 1.2, 0.6, 1.0, 0.8)[i % 5])
        grain = rng.random((h, w)) - 0.5
        base, spread = ((0.55, 0.28), (0.24, 0.30), (0.45, 0.48),
                        (0.62, 0.26), (0.30, 0.34))[i % 5]
        img = base + spread * (tex - 0.5) * 2.0
        if i % 5 == 0:
            img += 0.06 * grain + 0.85 * gratings[0]
        elif i % 5 == 1:
            img += 0.8 * gratings[1] + 0.05 * grain
        elif i % 5 == 2:
            img += 0.06 * grain + 0.05 * (_checker((h, w), period=5) - 0.5)
        elif i % 5 == 3:
            img += 0.05 * grain + 1.2 * gratings[2]
        else:
            img += 0.10 * grain + 0.4 * gratings[0]
        return img

    frames = []
    for i in range(n):
        gray = np.clip(recipe(i), 0.02, 0.98)
        tint = 1.0 + 0.08 * (rng.random(3) - 0.5)
        rgb = np.clip(gray[..., None] * tint[None, None, :], 0.0, 1.0)
        frames.append(Frame(rgb))
    return frames


def make_panning_sequence(n_frames: int = 30, size: tuple[int, int] = (256, 256),
                          shift_px: int = 2, seed: int = 0) -> list[Frame]:
    """Crop window sliding across a wide power-law texture, one frame per step.

    Values stay well inside [0, 1] so contrast enhancement leaves head-room
    for the noise (hard blacks/whites would suppress it entirely).
    """
    w, h = size
    rng = np.random.default_rng(seed)
    wide = power_law_texture((h, w + shift_px * n_frames + 8), rng, beta=1.0)
    ys, xs = np.mgrid[0:h, 0:wide.shape[1]]
    wide = 0.5 + 0.55 * (wide - 0.5) \
        + 0.05 * np.sign(np.sin(xs * 1.1) * np.sin(ys * 1.3))
    return [Frame.from_gray(np.clip(wide[:, i * shift_px:i * shift_px + w],
                                    0.12, 0.88))
            for i in range(n_frames)]

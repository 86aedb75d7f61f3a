"""Display-encoded frames and the sRGB transfer function.

Frames hold gamma-encoded RGB in [0, 1] plus a lazily computed linear
luminance cache; the cache is keyed by a checksum of the pixel buffer so a
mutated frame is caught instead of silently served stale.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

LUMA_WEIGHTS = (0.2126, 0.7152, 0.0722)

_SRGB_LINEAR_KNEE = 0.0031308
_SRGB_ENCODED_KNEE = 0.04045


def srgb_encode(linear: np.ndarray) -> np.ndarray:
    linear = np.asarray(linear, dtype=np.float64)
    lo = 12.92 * linear
    hi = 1.055 * np.power(np.maximum(linear, _SRGB_LINEAR_KNEE), 1.0 / 2.4) - 0.055
    return np.where(linear <= _SRGB_LINEAR_KNEE, lo, hi)


def srgb_decode(encoded: np.ndarray) -> np.ndarray:
    encoded = np.asarray(encoded, dtype=np.float64)
    lo = encoded / 12.92
    hi = np.power((np.maximum(encoded, _SRGB_ENCODED_KNEE) + 0.055) / 1.055, 2.4)
    return np.where(encoded <= _SRGB_ENCODED_KNEE, lo, hi)


def linear_luminance(rgb_encoded: np.ndarray) -> np.ndarray:
    """Photometric luminance of a display-encoded RGB image."""
    lin = srgb_decode(rgb_encoded)
    r, g, b = LUMA_WEIGHTS
    return r * lin[..., 0] + g * lin[..., 1] + b * lin[..., 2]


def _checksum(arr: np.ndarray) -> int:
    return zlib.adler32(np.ascontiguousarray(arr).view(np.uint8))


@dataclass
class Frame:
    """One display-encoded RGB image, values in [0, 1], shape (H, W, 3)."""

    rgb: np.ndarray
    _lum: np.ndarray | None = field(default=None, repr=False, compare=False)
    _lum_key: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rgb = np.asarray(self.rgb, dtype=np.float64)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError("frame must be (H, W, 3)")
        if rgb.min() < -1e-9 or rgb.max() > 1.0 + 1e-9:
            raise ValueError("frame values must lie in [0, 1]")
        self.rgb = np.clip(rgb, 0.0, 1.0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rgb.shape[:2]

    @property
    def linear_luminance(self) -> np.ndarray:
        key = _checksum(self.rgb)
        if self._lum is None or self._lum_key != key:
            self._lum = linear_luminance(self.rgb)
            self._lum_key = key
        return self._lum

    def luminance_consistent(self) -> bool:
        """True when the cache (if any) still matches the pixel buffer."""
        return self._lum is None or self._lum_key == _checksum(self.rgb)

    @classmethod
    def from_gray(cls, gray: np.ndarray) -> "Frame":
        gray = np.asarray(gray, dtype=np.float64)
        return cls(np.repeat(gray[..., None], 3, axis=2))

"""Viewing geometry: display setup, per-pixel retinal eccentricity, unit
conversions between pixels / visual degrees / spatial frequencies, and the
foveation sigma map.

The eye is placed on the screen normal through the gaze point at the viewing
distance.  Eccentricity at a pixel is the exact angle between the gaze ray and
the ray to that pixel (flat-screen trigonometry, no small-angle shortcut), and
degrees-per-pixel is the local derivative of the visual angle, so conversions
stay honest out to wide fields of view where flat-screen distortion matters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def ensure_finite(name: str, values: np.ndarray) -> np.ndarray:
    """Reject NaN/Inf in a per-pixel field."""
    values = np.asarray(values)
    if not np.isfinite(values).all():
        raise ValueError(f"{name} contains NaN or Inf values")
    return values


@dataclass(frozen=True)
class ViewingSetup:
    """Display geometry plus gaze position.

    resolution_px / physical_size_m are (width, height); gaze_px is a
    sub-pixel (x, y) image coordinate with pixel centers at integers.
    """

    resolution_px: tuple[int, int]
    physical_size_m: tuple[float, float]
    viewing_distance_m: float
    gaze_px: tuple[float, float]

    def __post_init__(self):
        w, h = self.resolution_px
        pw, ph = self.physical_size_m
        if min(w, h) <= 0 or min(pw, ph) <= 0 or self.viewing_distance_m <= 0:
            raise ValueError("all viewing dimensions must be strictly positive")
        gx, gy = self.gaze_px
        if not (0.0 <= gx <= w - 1 and 0.0 <= gy <= h - 1):
            raise ValueError("gaze must lie inside the image bounds")

    @property
    def pixel_pitch_m(self) -> tuple[float, float]:
        return (self.physical_size_m[0] / self.resolution_px[0],
                self.physical_size_m[1] / self.resolution_px[1])

    @property
    def mean_pitch_m(self) -> float:
        px, py = self.pixel_pitch_m
        return 0.5 * (px + py)

    def with_gaze(self, gaze_px: tuple[float, float]) -> "ViewingSetup":
        return ViewingSetup(self.resolution_px, self.physical_size_m,
                            self.viewing_distance_m, gaze_px)

    def horizontal_fov_deg(self) -> float:
        """Total horizontal field of view subtended by the screen."""
        w_m, _ = self.physical_size_m
        gx, _ = self.gaze_px
        px, _ = self.pixel_pitch_m
        left = (gx + 0.5) * px
        right = w_m - left
        d = self.viewing_distance_m
        return float(np.degrees(np.arctan(left / d) + np.arctan(right / d)))

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps({
            "resolution_px": list(self.resolution_px),
            "physical_size_m": list(self.physical_size_m),
            "viewing_distance_m": self.viewing_distance_m,
            "gaze_px": list(self.gaze_px),
        }, indent=2))

    @classmethod
    def from_json(cls, path: str | Path) -> "ViewingSetup":
        raw = json.loads(Path(path).read_text())
        return cls(
            resolution_px=tuple(int(v) for v in raw["resolution_px"]),
            physical_size_m=tuple(float(v) for v in raw["physical_size_m"]),
            viewing_distance_m=float(raw["viewing_distance_m"]),
            gaze_px=tuple(float(v) for v in raw["gaze_px"]),
        )


def _radial_distance_m(setup: ViewingSetup, x, y):
    gx, gy = setup.gaze_px
    px, py = setup.pixel_pitch_m
    return np.hypot((np.asarray(x, dtype=np.float64) - gx) * px,
                    (np.asarray(y, dtype=np.float64) - gy) * py)


def eccentricity_at(setup: ViewingSetup, x, y):
    """Eccentricity in visual degrees at sub-pixel coordinates (x, y)."""
    r = _radial_distance_m(setup, x, y)
    return np.degrees(np.arctan2(r, setup.viewing_distance_m))


def deg_per_px_at(setup: ViewingSetup, x, y):
    """Local degrees subtended by one pixel step at (x, y).

    Derivative of the visual angle along the radial direction:
    d(atan(r/d))/dr = d / (d^2 + r^2), scaled by the mean pixel pitch.
    """
    r = _radial_distance_m(setup, x, y)
    d = setup.viewing_distance_m
    return np.degrees(d / (d * d + r * r) * setup.mean_pitch_m)


def _pixel_grid(setup: ViewingSetup):
    w, h = setup.resolution_px
    ys, xs = np.mgrid[0:h, 0:w]
    return xs, ys


def eccentricity_map(setup: ViewingSetup) -> np.ndarray:
    """Per-pixel eccentricity field in visual degrees, shape (H, W)."""
    xs, ys = _pixel_grid(setup)
    return ensure_finite("eccentricity_map", eccentricity_at(setup, xs, ys))


def deg_per_px_map(setup: ViewingSetup) -> np.ndarray:
    """Per-pixel degrees-per-pixel field, shape (H, W). Always finite and positive."""
    xs, ys = _pixel_grid(setup)
    out = deg_per_px_at(setup, xs, ys)
    ensure_finite("deg_per_px_map", out)
    if not (out > 0).all():
        raise ValueError("deg_per_px_map must be strictly positive")
    return out


def sigma_map(setup: ViewingSetup, blur_rate: float,
              fovea_radius: float = 8.0) -> np.ndarray:
    """Foveation blur standard deviation in pixels.

    blur_rate is in arcmin per degree of eccentricity; sigma grows linearly
    beyond the fovea radius and is exactly zero inside it.
    """
    if blur_rate < 0:
        raise ValueError("blur_rate must be >= 0")
    if fovea_radius < 0:
        raise ValueError("fovea_radius must be >= 0")
    ecc = eccentricity_map(setup)
    sigma_arcmin = blur_rate * np.maximum(0.0, ecc - fovea_radius)
    sigma_deg = sigma_arcmin / 60.0
    return ensure_finite("sigma_map", sigma_deg / deg_per_px_map(setup))


def sigma_px_at(setup: ViewingSetup, x, y, blur_rate: float,
                fovea_radius: float = 8.0):
    """Pointwise version of sigma_map at sub-pixel coordinates."""
    ecc = eccentricity_at(setup, x, y)
    sigma_deg = blur_rate * np.maximum(0.0, ecc - fovea_radius) / 60.0
    return sigma_deg / deg_per_px_at(setup, x, y)

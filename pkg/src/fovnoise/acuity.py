"""Peripheral acuity limits and the per-location noise frequency band.

Resolution acuity (the finest grating whose structure can be resolved) and
detection acuity (the finest grating whose presence can still be noticed)
diverge away from the gaze point; the gap between them is the band this
package fills with procedural noise.  The embedded table is linearly
interpolated and clamped to its last row beyond 30 degrees.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Interferometric acuity measurements: eccentricity (deg) -> cycles/degree.
ACUITY_KNOTS_DEG = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
RESOLUTION_LIMIT_CPD = (60.0, 27.0, 10.5, 8.0, 5.5, 4.8, 4.0)
DETECTION_LIMIT_CPD = (60.0, 40.0, 26.0, 24.0, 23.0, 21.0, 20.5)

# Nyquist limit of the display in cycles per pixel.
DISPLAY_NYQUIST_CPP = 0.5


@dataclass(frozen=True)
class AcuityLimits:
    """Piecewise-linear resolution/detection acuity limits vs eccentricity."""

    eccentricity_knots: np.ndarray = field(
        default_factory=lambda: np.array(ACUITY_KNOTS_DEG))
    t_low: np.ndarray = field(
        default_factory=lambda: np.array(RESOLUTION_LIMIT_CPD))
    t_high: np.ndarray = field(
        default_factory=lambda: np.array(DETECTION_LIMIT_CPD))

    def __post_init__(self):
        knots = np.asarray(self.eccentricity_knots, dtype=np.float64)
        lo = np.asarray(self.t_low, dtype=np.float64)
        hi = np.asarray(self.t_high, dtype=np.float64)
        if not (knots.shape == lo.shape == hi.shape) or knots.ndim != 1:
            raise ValueError("knots and limits must be 1-D arrays of equal length")
        if not (np.diff(knots) > 0).all():
            raise ValueError("eccentricity knots must be strictly increasing")
        if not (lo <= hi).all():
            raise ValueError("t_low must not exceed t_high at any knot")
        if knots[0] == 0.0 and not (lo[0] == hi[0] == 60.0):
            raise ValueError("at eccentricity 0 both limits must equal 60 cpd")
        object.__setattr__(self, "eccentricity_knots", knots)
        object.__setattr__(self, "t_low", lo)
        object.__setattr__(self, "t_high", hi)

    @classmethod
    def from_csv(cls, path: str | Path) -> "AcuityLimits":
        """Load (eccentricity, t_low, t_high) rows; a header row is skipped."""
        knots, lo, hi = [], [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                try:
                    vals = [float(v) for v in row[:3]]
                except ValueError:
                    continue  # header
                knots.append(vals[0])
                lo.append(vals[1])
                hi.append(vals[2])
        return cls(np.array(knots), np.array(lo), np.array(hi))


def thibos_limits(limits: AcuityLimits, eccentricity_deg):
    """Resolution and detection limits (cycles/degree) at an eccentricity.

    Linear interpolation between knots; clamped to the boundary rows outside
    the measured range.  Accepts scalars or arrays; negative input rejected.
    """
    e = np.asarray(eccentricity_deg, dtype=np.float64)
    if (e < 0).any():
        raise ValueError("eccentricity must be >= 0")
    t_low = np.interp(e, limits.eccentricity_knots, limits.t_low)
    t_high = np.interp(e, limits.eccentricity_knots, limits.t_high)
    if np.isscalar(eccentricity_deg) or e.ndim == 0:
        return float(t_low), float(t_high)
    return t_low, t_high


def noise_band(t_low, t_high, sigma_px, deg_per_px,
               f_display_cpp: float = DISPLAY_NYQUIST_CPP):
    """Frequency band (cycles/degree) available to the noise at a location.

    The lower limit is the resolution acuity pushed up by the foveation blur:
    a Gaussian of spatial std sigma attenuates to ~1% at 3/(2*pi*sigma)
    cycles/px, below which content survived the blur and must not be touched.
    The upper limit is the detection acuity capped by the display Nyquist.
    Returns (f_low_cpd, f_high_cpd, empty) elementwise; the band is empty
    where f_low >= f_high, and everywhere sigma == 0 (inside the fovea no
    frequency was removed, so there is nothing to replace).
    """
    t_low = np.asarray(t_low, dtype=np.float64)
    t_high = np.asarray(t_high, dtype=np.float64)
    sigma_px = np.asarray(sigma_px, dtype=np.float64)
    deg_per_px = np.asarray(deg_per_px, dtype=np.float64)
    if (t_low <= 0).any() or (t_high <= 0).any():
        raise ValueError("acuity limits must be positive")
    if (deg_per_px <= 0).any():
        raise ValueError("deg_per_px must be positive")
    if f_display_cpp <= 0:
        raise ValueError("display frequency limit must be positive")

    with np.errstate(divide="ignore"):
        blur_bound_cpd = np.where(
            sigma_px > 0,
            (3.0 / (2.0 * np.pi * np.maximum(sigma_px, 1e-300))) / deg_per_px,
            np.inf)
    f_low = np.maximum(t_low, blur_bound_cpd)
    f_high = np.minimum(t_high, f_display_cpp / deg_per_px)
    empty = f_low >= f_high

    if f_low.ndim == 0:
        return float(f_low), float(f_high), bool(empty)
    return f_low, f_high, empty

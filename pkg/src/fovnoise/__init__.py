"""Noise-based enhancement for foveated images.

Estimates perceptually bounded Gabor-noise parameters from a foveated image,
synthesizes the noise, composites it over a contrast-enhanced image, and
verifies the result with spectral and temporal analyses.
"""

from .acuity import AcuityLimits, noise_band, thibos_limits
from .config import EnhanceConfig, calibrated_constants, nearest_calibrated_row
from .gabor import GaborGrid, ImpulseSet, generate_impulses, kernel_eval, synthesize
from .geometry import (ViewingSetup, deg_per_px_at, deg_per_px_map,
                       eccentricity_at, eccentricity_map, sigma_map)
from .noiseparams import (FrequencySpec, amplitude_field, attenuate_for_clipping,
                          cutoff_level, frequency_spec, orientation_field,
                          sample_frequency)
from .pyramids import (Pyramid, build_pyramid, frequency_to_level,
                       level_to_frequency, sample_laplacian_log, upsample_bicubic)

__all__ = [
    "AcuityLimits", "EnhanceConfig", "FrequencySpec", "GaborGrid", "ImpulseSet",
    "Pyramid", "ViewingSetup", "amplitude_field", "attenuate_for_clipping",
    "build_pyramid", "calibrated_constants", "cutoff_level", "deg_per_px_at",
    "deg_per_px_map", "eccentricity_at", "eccentricity_map", "frequency_spec",
    "frequency_to_level", "generate_impulses", "kernel_eval",
    "level_to_frequency", "nearest_calibrated_row", "noise_band",
    "orientation_field", "sample_frequency", "sample_laplacian_log",
    "sigma_map", "synthesize", "thibos_limits",
]

__version__ = "0.1.0"

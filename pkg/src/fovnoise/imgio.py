"""Image and sidecar file I/O.

PNG (8- or 16-bit) carries display-encoded values; EXR carries linear RGB
(converted through the sRGB transfer on the way in/out) or a raw
single-channel field such as an imported sigma map.  Every image can travel
with a JSON sidecar holding the viewing setup and enhancement config.
"""

from __future__ import annotations

import json
from pathlib import Path

import cv2
import numpy as np

from .config import EnhanceConfig
from .exr import read_exr, write_exr
from .frames import Frame, srgb_decode, srgb_encode
from .geometry import ViewingSetup


def read_frame(path: str | Path) -> Frame:
    path = Path(path)
    if path.suffix.lower() == ".exr":
        ch = read_exr(path)
        try:
            linear = np.stack([ch["R"], ch["G"], ch["B"]], axis=2)
        except KeyError:
            raise ValueError(f"{path} lacks R/G/B channels") from None
        return Frame(np.clip(srgb_encode(np.maximum(linear, 0.0)), 0.0, 1.0))
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"could not read image {path}")
    if raw.ndim == 2:
        raw = raw[..., None].repeat(3, axis=2)
    if raw.shape[2] == 4:
        raw = raw[..., :3]
    rgb = raw[..., ::-1].astype(np.float64)
    maxval = 65535.0 if raw.dtype == np.uint16 else 255.0
    return Frame(rgb / maxval)


def write_frame(path: str | Path, frame: Frame, bit_depth: int = 8) -> None:
    path = Path(path)
    if path.suffix.lower() == ".exr":
        linear = srgb_decode(frame.rgb).astype(np.float32)
        write_exr(path, {"R": linear[..., 0], "G": linear[..., 1],
                         "B": linear[..., 2]})
        return
    if bit_depth == 8:
        data = (frame.rgb * 255.0 + 0.5).astype(np.uint8)
    elif bit_depth == 16:
        data = (frame.rgb * 65535.0 + 0.5).astype(np.uint16)
    else:
        raise ValueError("bit_depth must be 8 or 16")
    if not cv2.imwrite(str(path), data[..., ::-1]):
        raise IOError(f"could not write image {path}")


def encode_png(frame: Frame, bit_depth: int = 8) -> bytes:
    data = ((frame.rgb * 255.0 + 0.5).astype(np.uint8) if bit_depth == 8
            else (frame.rgb * 65535.0 + 0.5).astype(np.uint16))
    ok, buf = cv2.imencode(".png", data[..., ::-1])
    if not ok:
        raise IOError("PNG encoding failed")
    return buf.tobytes()


def read_sigma_map(path: str | Path) -> np.ndarray:
    """Single-channel EXR resolution map from a real foveated renderer."""
    ch = read_exr(path)
    if len(ch) != 1:
        raise ValueError("sigma map EXR must carry exactly one channel")
    sigma = next(iter(ch.values())).astype(np.float64)
    if (sigma < 0).any() or not np.isfinite(sigma).all():
        raise ValueError("sigma map must be finite and non-negative")
    return sigma


def write_sigma_map(path: str | Path, sigma: np.ndarray) -> None:
    write_exr(path, {"sigma": np.asarray(sigma, dtype=np.float32)})


def sidecar_path(image_path: str | Path) -> Path:
    return Path(image_path).with_suffix(".json")


def write_sidecar(image_path: str | Path, setup: ViewingSetup,
                  config: EnhanceConfig) -> Path:
    path = sidecar_path(image_path)
    path.write_text(json.dumps({
        "viewing_setup": {
            "resolution_px": list(setup.resolution_px),
            "physical_size_m": list(setup.physical_size_m),
            "viewing_distance_m": setup.viewing_distance_m,
            "gaze_px": list(setup.gaze_px),
        },
        "enhance_config": config.to_dict(),
    }, indent=2))
    return path


def read_sidecar(image_path: str | Path) -> tuple[ViewingSetup, EnhanceConfig]:
    raw = json.loads(sidecar_path(image_path).read_text())
    vs = raw["viewing_setup"]
    setup = ViewingSetup(
        resolution_px=tuple(int(v) for v in vs["resolution_px"]),
        physical_size_m=tuple(float(v) for v in vs["physical_size_m"]),
        viewing_distance_m=float(vs["viewing_distance_m"]),
        gaze_px=tuple(float(v) for v in vs["gaze_px"]),
    )
    return setup, EnhanceConfig.from_dict(raw["enhance_config"])

"""Sparse Gabor convolution noise.

A regular cell grid carries seeded random impulses; each impulse is assigned
frequency / amplitude / orientation from the parameter fields at its own
position and splats a truncated Gabor kernel.  The cell size equals the
kernel truncation radius, so only the 3x3 cell neighbourhood of a pixel can
reach it, and a fixed per-cell impulse count (the expected value of the
impulses-per-kernel density) keeps the pattern deterministic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import hashrand
from .config import DEFAULT_IMPULSES_PER_KERNEL
from .geometry import ViewingSetup, deg_per_px_at
from .noiseparams import FrequencySpec, _rejection_sample

DEFAULT_BANDWIDTH_CPP = 0.06

# draw-counter slots per impulse: 0 -> x, 1 -> y, 2 -> weight,
# 3 + j -> frequency rejection round j
_CTR_X, _CTR_Y, _CTR_WEIGHT, _CTR_FREQ0 = 0, 1, 2, 3

_SPLAT_CHUNK = 512  # impulses per vectorized chunk; patches stay cache-sized


@dataclass(frozen=True)
class GaborGrid:
    """Impulse grid geometry and seeding.

    bandwidth_a is the Gaussian envelope parameter in cycles/px (frequency-
    domain kernel width); the truncation radius is one envelope width,
    ceil(1/a) px, and each grid cell is exactly one radius across.
    """

    bandwidth_a: float = DEFAULT_BANDWIDTH_CPP
    impulses_per_kernel: int = DEFAULT_IMPULSES_PER_KERNEL
    seed: int = 0

    def __post_init__(self):
        if self.bandwidth_a <= 0:
            raise ValueError("bandwidth must be positive")
        if self.impulses_per_kernel < 1:
            raise ValueError("impulses_per_kernel must be >= 1")

    @property
    def kernel_radius_px(self) -> int:
        return int(np.ceil(1.0 / self.bandwidth_a))

    @property
    def cell_size_px(self) -> int:
        return self.kernel_radius_px

    @property
    def impulses_per_cell(self) -> int:
        # density * cell_area / kernel_area with cell = radius
        return int(np.rint(self.impulses_per_kernel / np.pi))


@dataclass
class ImpulseSet:
    """Parallel arrays, one entry per impulse (cell-major order)."""

    x: np.ndarray
    y: np.ndarray
    weight: np.ndarray
    cell_ix: np.ndarray
    cell_iy: np.ndarray
    index_in_cell: np.ndarray

    def __len__(self) -> int:
        return self.x.size


def kernel_eval(f0_cpp, omega, a, dx, dy, radius=None):
    """Truncated Gabor kernel value at offset (dx, dy) pixels.

    exp(-pi a^2 (dx^2+dy^2)) * cos(2 pi f0 (dx cos w + dy sin w)); zero
    beyond the truncation radius (ceil(1/a) px unless given).
    """
    dx = np.asarray(dx, dtype=np.float64)
    dy = np.asarray(dy, dtype=np.float64)
    if radius is None:
        radius = np.ceil(1.0 / a)
    r2 = dx * dx + dy * dy
    envelope = np.exp(-np.pi * a * a * r2)
    phase = 2.0 * np.pi * f0_cpp * (dx * np.cos(omega) + dy * np.sin(omega))
    out = envelope * np.cos(phase) * (r2 <= radius * radius)
    return float(out) if out.ndim == 0 else out


def generate_impulses(grid: GaborGrid, image_dims: tuple[int, int]) -> ImpulseSet:
    """Seeded impulses for every cell covering (width, height).

    Per cell: a fixed count of impulses with positions uniform in the cell
    and weights uniform in [-1, 1], every variate keyed by
    (seed, cell_ix, cell_iy, impulse, counter) so the set is identical across
    frames and independent of evaluation order.
    """
    w, h = image_dims
    cell = grid.cell_size_px
    nx = int(np.ceil(w / cell))
    ny = int(np.ceil(h / cell))
    n = grid.impulses_per_cell
    if n == 0:
        e = np.empty(0)
        i = np.empty(0, dtype=np.intp)
        return ImpulseSet(e, e.copy(), e.copy(), i, i.copy(), i.copy())

    # cell-major order: a cell's impulses are consecutive, so downstream
    # chunking touches a density-independent footprint of output rows
    iys, ixs, iis = np.meshgrid(np.arange(ny), np.arange(nx), np.arange(n),
                                indexing="ij")
    ixs = ixs.ravel()
    iys = iys.ravel()
    iis = iis.ravel()
    ux = hashrand.uniform01(grid.seed, ixs, iys, iis, _CTR_X)
    uy = hashrand.uniform01(grid.seed, ixs, iys, iis, _CTR_Y)
    uw = hashrand.uniform01(grid.seed, ixs, iys, iis, _CTR_WEIGHT)
    return ImpulseSet(
        x=(ixs + ux) * cell,
        y=(iys + uy) * cell,
        weight=2.0 * uw - 1.0,
        cell_ix=ixs,
        cell_iy=iys,
        index_in_cell=iis,
    )


def _splat(grid: GaborGrid, shape: tuple[int, int], x, y,
           signed_amp, f_cpp, omega) -> np.ndarray:
    """Accumulate truncated Gabor patches into an (H, W) field.

    The kernel separates as cos(A+B) = cosA cosB - sinA sinB with
    A = ax*dx, B = ay*dy, so each patch is two outer products; the radial
    truncation mask is applied per patch.
    """
    h, w = shape
    out = np.zeros((h, w), dtype=np.float64)
    n = len(np.atleast_1d(x))
    if n == 0:
        return out
    R = grid.kernel_radius_px
    a2pi = np.pi * grid.bandwidth_a ** 2
    offs = np.arange(-R, R + 1, dtype=np.float64)
    k = offs.size
    cx = np.rint(x).astype(np.intp)
    cy = np.rint(y).astype(np.intp)

    for lo in range(0, n, _SPLAT_CHUNK):
        sl = slice(lo, min(lo + _SPLAT_CHUNK, n))
        dx = offs[None, :] + (cx[sl] - x[sl])[:, None]
        dy = offs[None, :] + (cy[sl] - y[sl])[:, None]
        ex = np.exp(-a2pi * dx * dx) * signed_amp[sl, None]
        ey = np.exp(-a2pi * dy * dy)
        ax = (2.0 * np.pi * f_cpp[sl] * np.cos(omega[sl]))[:, None]
        ay = (2.0 * np.pi * f_cpp[sl] * np.sin(omega[sl]))[:, None]
        px, py = ax * dx, ay * dy
        patches = (np.einsum("ny,nx->nyx", ey * np.cos(py), ex * np.cos(px))
                   - np.einsum("ny,nx->nyx", ey * np.sin(py), ex * np.sin(px)))
        patches *= (dy * dy)[:, :, None] + (dx * dx)[:, None, :] <= R * R

        for i in range(patches.shape[0]):
            gx = cx[sl][i] - R
            gy = cy[sl][i] - R
            x0, x1 = max(gx, 0), min(gx + k, w)
            y0, y1 = max(gy, 0), min(gy + k, h)
            if x0 >= x1 or y0 >= y1:
                continue
            out[y0:y1, x0:x1] += patches[i, y0 - gy:y1 - gy, x0 - gx:x1 - gx]
    return out


def assign_impulse_parameters(grid: GaborGrid, imp: ImpulseSet,
                              freq_spec_field: FrequencySpec,
                              amplitude_field: np.ndarray,
                              orientation_field: np.ndarray,
                              setup: ViewingSetup):
    """Per-impulse (live_mask, f_cpp, amplitude, orientation).

    Fields are sampled at the nearest pixel to each impulse position;
    frequencies are drawn (cycles/degree) from the truncated log-normal
    there via counter-keyed rejection rounds, then converted to cycles/px
    with the local degrees-per-pixel at the impulse position.  Impulses
    with an empty band or zero amplitude are marked dead.
    """
    amplitude_field = np.asarray(amplitude_field, dtype=np.float64)
    orientation_field = np.asarray(orientation_field, dtype=np.float64)
    h, w = amplitude_field.shape
    if orientation_field.shape != (h, w):
        raise ValueError("parameter fields must share one resolution")
    if (w, h) != setup.resolution_px:
        raise ValueError("parameter fields must match the viewing setup resolution")

    pxi = np.clip(np.rint(imp.x).astype(np.intp), 0, w - 1)
    pyi = np.clip(np.rint(imp.y).astype(np.intp), 0, h - 1)
    amp = amplitude_field[pyi, pxi]
    empty = np.broadcast_to(np.asarray(freq_spec_field.empty), (h, w))[pyi, pxi]
    live = (amp > 0) & ~empty
    if not live.any():
        z = np.zeros(0)
        return live, z, z.copy(), z.copy()

    mu = np.broadcast_to(freq_spec_field.mu_n, (h, w))[pyi, pxi][live]
    sig = np.broadcast_to(freq_spec_field.sigma_n, (h, w))[pyi, pxi][live]
    fh = np.broadcast_to(freq_spec_field.f_high_trunc, (h, w))[pyi, pxi][live]
    ixs = imp.cell_ix[live]
    iys = imp.cell_iy[live]
    iis = imp.index_in_cell[live]

    def draw(j, pending):
        return hashrand.standard_normal(grid.seed, ixs[pending], iys[pending],
                                        iis[pending], _CTR_FREQ0 + j)

    f_cpd = _rejection_sample(mu, sig, fh, draw)
    f_cpp = np.minimum(
        f_cpd * deg_per_px_at(setup, imp.x[live], imp.y[live]), 0.5)
    return live, f_cpp, amp[live], orientation_field[pyi, pxi][live]


def synthesize(grid: GaborGrid, freq_spec_field: FrequencySpec,
               amplitude_field: np.ndarray, orientation_field: np.ndarray,
               setup: ViewingSetup) -> np.ndarray:
    """Signed noise field (normalized luminance) at full resolution.

    Each impulse takes its parameters from the fields at its own position
    and splats a truncated Gabor patch; impulses with an empty band or zero
    amplitude contribute nothing.
    """
    h, w = np.asarray(amplitude_field).shape
    imp = generate_impulses(grid, (w, h))
    if len(imp) == 0:
        return np.zeros((h, w), dtype=np.float64)
    live, f_cpp, amp, omega = assign_impulse_parameters(
        grid, imp, freq_spec_field, amplitude_field, orientation_field, setup)
    if not live.any():
        return np.zeros((h, w), dtype=np.float64)
    return _splat(grid, (h, w), imp.x[live], imp.y[live],
                  imp.weight[live] * amp, f_cpp, omega)


def dump_impulses_csv(path: str | Path, grid: GaborGrid,
                      imp: ImpulseSet, f_cpp=None, amp=None, omega=None) -> None:
    """Impulse audit dump; parameter columns are blank when not supplied."""
    n = len(imp)

    def col(v):
        return np.broadcast_to(np.asarray(v, dtype=np.float64), (n,)) \
            if v is not None else [""] * n

    fs, As, Os = col(f_cpp), col(amp), col(omega)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["cell_ix", "cell_iy", "index_in_cell", "x_px", "y_px",
                      "weight", "frequency_cpp", "amplitude", "orientation_rad"])
        for i in range(n):
            out.writerow([imp.cell_ix[i], imp.cell_iy[i], imp.index_in_cell[i],
                          f"{imp.x[i]:.6f}", f"{imp.y[i]:.6f}",
                          f"{imp.weight[i]:.6f}", fs[i], As[i], Os[i]])

"""Counter-based random numbers for the impulse grid.

Every variate is a pure function of its integer key tuple (seed, cell ix,
cell iy, impulse index, draw counter), so impulse generation is independent
of evaluation order, identical across frames, and fully vectorizable: no
generator objects, no stream state.  The mixer is splitmix64, chained over
the key tuple with the tuple length folded in first.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _mix(x: np.ndarray) -> np.ndarray:
    x = (x + _GOLDEN) & np.uint64(0xFFFFFFFFFFFFFFFF)
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def hash_u64(*keys) -> np.ndarray:
    """64-bit hash of the broadcast key tuple."""
    with np.errstate(over="ignore"):
        h = _mix(np.uint64(len(keys)))
        for k in keys:
            k = np.asarray(k)
            if k.dtype.kind != "u":
                k = k.astype(np.int64).astype(np.uint64)
            h = _mix(h ^ k)
    return h


def uniform01(*keys) -> np.ndarray:
    """Uniform in [0, 1) from the key tuple."""
    return (hash_u64(*keys) >> np.uint64(11)).astype(np.float64) * _INV_2_53


def standard_normal(*keys) -> np.ndarray:
    """Standard normal via Box-Muller; consumes sub-counters 0 and 1."""
    u1 = uniform01(*keys, 0)
    u2 = uniform01(*keys, 1)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)

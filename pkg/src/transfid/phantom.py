"""Deterministic synthetic volume + ellipsoid mask for self-testing."""
from __future__ import annotations

import numpy as np

from .volume import RoiMask, Volume3D

# lattice pitch of the value noise, in voxels
_NOISE_PITCH = 4
# ellipsoid semi-axis fraction giving roughly 30% volume coverage
_ELLIPSOID_FRACTION = 0.83


def generate_phantom(
    seed: int,
    dims: tuple[int, int, int] = (16, 16, 16),
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> tuple[Volume3D, RoiMask]:
    """Smooth seeded value-noise volume in [0, 1] with an ellipsoidal ROI.

    Output is a pure function of (seed, dims, spacing).
    """
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)

    lattice_dims = [d // _NOISE_PITCH + 2 for d in dims]
    lattice = rng.random(lattice_dims)

    coords = [np.arange(d) / _NOISE_PITCH for d in dims]
    idx = [c.astype(np.int64) for c in coords]
    frac = [c - i for c, i in zip(coords, idx)]

    def corner(ox: int, oy: int, oz: int) -> np.ndarray:
        return lattice[
            np.ix_(idx[0] + ox, idx[1] + oy, idx[2] + oz)
        ]

    fx = frac[0][:, None, None]
    fy = frac[1][None, :, None]
    fz = frac[2][None, None, :]
    values = (
        corner(0, 0, 0) * (1 - fx) * (1 - fy) * (1 - fz)
        + corner(1, 0, 0) * fx * (1 - fy) * (1 - fz)
        + corner(0, 1, 0) * (1 - fx) * fy * (1 - fz)
        + corner(0, 0, 1) * (1 - fx) * (1 - fy) * fz
        + corner(1, 1, 0) * fx * fy * (1 - fz)
        + corner(1, 0, 1) * fx * (1 - fy) * fz
        + corner(0, 1, 1) * (1 - fx) * fy * fz
        + corner(1, 1, 1) * fx * fy * fz
    )
    lo, hi = values.min(), values.max()
    values = (values - lo) / (hi - lo) if hi > lo else np.zeros(dims)

    centers = [(d - 1) / 2.0 for d in dims]
    semi = [max(_ELLIPSOID_FRACTION * d / 2.0, 0.75) for d in dims]
    grids = np.meshgrid(*(np.arange(d, dtype=np.float64) for d in dims), indexing="ij")
    r2 = sum(((g - c) / s) ** 2 for g, c, s in zip(grids, centers, semi))
    flags = r2 <= 1.0

    return Volume3D(dims, spacing, values), RoiMask(dims, flags)

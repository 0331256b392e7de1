"""Intensity normalization, ROI-centered cropping, and gray-level discretization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CropLosesRoi, InvalidScheme
from .volume import RoiMask, Volume3D

FBN = "FBN"
FBS = "FBS"


@dataclass(frozen=True)
class DiscretizationScheme:
    """Fixed-bin-number (bins = Ng) or fixed-bin-size (width, origin) binning."""

    mode: str
    bins: int = 32
    width: float = 0.0
    origin: float = 0.0

    def __post_init__(self):
        if self.mode == FBN:
            if self.bins < 2:
                raise InvalidScheme(f"FBN needs at least 2 bins, got {self.bins}")
        elif self.mode == FBS:
            if not self.width > 0:
                raise InvalidScheme(f"FBS needs positive bin width, got {self.width}")
        else:
            raise InvalidScheme(f"unknown discretization mode {self.mode!r}")

    def describe(self) -> str:
        if self.mode == FBN:
            return f"FBN(bins={self.bins})"
        return f"FBS(width={self.width!r}, origin={self.origin!r})"


@dataclass(frozen=True)
class DiscretizedVolume:
    """Integer gray levels for in-mask voxels; out-of-mask voxels hold level 0."""

    dims: tuple[int, int, int]
    spacing: tuple[float, float, float]
    levels: np.ndarray = field(repr=False)
    ng: int = 1
    scheme: DiscretizationScheme | None = None
    mask: RoiMask | None = None

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=np.int32).copy()
        inside = self.mask.flags if self.mask is not None else levels > 0
        lv = levels[inside]
        if lv.size and (lv.min() < 1 or lv.max() > self.ng):
            raise ValueError("in-mask levels must lie in [1, ng]")
        levels.flags.writeable = False
        object.__setattr__(self, "levels", levels)

    @property
    def roi_levels(self) -> np.ndarray:
        """Levels of in-mask voxels only (1D)."""
        return self.levels[self.mask.flags]


def min_max_normalize(v: Volume3D) -> Volume3D:
    """Affinely map the whole volume onto [0, 1]; constant volumes map to zeros."""
    lo = float(v.values.min())
    hi = float(v.values.max())
    if hi == lo:
        return v.with_values(np.zeros(v.dims))
    return v.with_values((v.values - lo) / (hi - lo))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def mask_centroid(mask: RoiMask) -> tuple[int, int, int]:
    """Integer centroid of in-mask voxels, rounded half-up per axis."""
    coords = np.nonzero(mask.flags)
    return tuple(_round_half_up(float(np.mean(axis))) for axis in coords)


def crop_centered(
    v: Volume3D, mask: RoiMask, target: tuple[int, int, int]
) -> tuple[Volume3D, RoiMask]:
    """Crop volume and mask to `target` voxels around the mask centroid.

    The window along each axis starts at centroid - target//2; regions
    falling outside the source grid are zero-filled (mask false there).
    """
    mask.check_aligned(v)
    target = tuple(int(t) for t in target)
    if any(t <= 0 for t in target):
        raise ValueError(f"crop target must be positive, got {target}")

    center = mask_centroid(mask)
    starts = [c - t // 2 for c, t in zip(center, target)]

    out_vals = np.zeros(target)
    out_flags = np.zeros(target, dtype=bool)
    src_lo = [max(0, s) for s in starts]
    src_hi = [min(d, s + t) for d, s, t in zip(v.dims, starts, target)]
    if all(lo < hi for lo, hi in zip(src_lo, src_hi)):
        dst_lo = [lo - s for lo, s in zip(src_lo, starts)]
        dst_hi = [hi - s for hi, s in zip(src_hi, starts)]
        src = tuple(slice(lo, hi) for lo, hi in zip(src_lo, src_hi))
        dst = tuple(slice(lo, hi) for lo, hi in zip(dst_lo, dst_hi))
        out_vals[dst] = v.values[src]
        out_flags[dst] = mask.flags[src]
    if not out_flags.any():
        raise CropLosesRoi(f"crop to {target} at centroid {center} removed the whole ROI")
    return Volume3D(target, v.spacing, out_vals), RoiMask(target, out_flags)


def discretize(v: Volume3D, mask: RoiMask, scheme: DiscretizationScheme) -> DiscretizedVolume:
    """Map in-mask intensities to integer gray levels 1..Ng."""
    mask.check_aligned(v)
    roi = v.values[mask.flags]
    levels = np.zeros(v.dims, dtype=np.int64)

    if scheme.mode == FBN:
        lo = float(roi.min())
        hi = float(roi.max())
        if hi == lo:
            levels[mask.flags] = 1
            ng = 1
        else:
            ng = scheme.bins
            lv = np.floor(ng * (roi - lo) / (hi - lo)).astype(np.int64) + 1
            np.minimum(lv, ng, out=lv)
            levels[mask.flags] = lv
    else:
        raw = np.floor((roi - scheme.origin) / scheme.width).astype(np.int64) + 1
        raw += 1 - raw.min()
        levels[mask.flags] = raw
        ng = int(raw.max())
    return DiscretizedVolume(v.dims, v.spacing, levels, ng=ng, scheme=scheme, mask=mask)

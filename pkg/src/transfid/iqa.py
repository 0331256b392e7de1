"""Pairwise image-quality metrics over 3D volumes: MAE, MSE, SSIM, PSNR."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DimsMismatch, EmptyInput, VolumeTooSmall
from .stats import mean_std
from .volume import RoiMask, Volume3D


@dataclass(frozen=True)
class SsimParams:
    """Gaussian-window SSIM constants; the window spans (2*window+1)^3 voxels."""

    window: int = 5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0
    sigma: float = 1.5

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window half-width must be >= 1")
        if min(self.k1, self.k2, self.dynamic_range, self.sigma) <= 0:
            raise ValueError("k1, k2, dynamic_range, and sigma must be positive")


@dataclass(frozen=True)
class MetricSet:
    mae: float
    mse: float
    ssim: float
    psnr: float


@dataclass(frozen=True)
class MetricSummary:
    """Per-metric sample mean and (n-1) std; std is NaN when n = 1."""

    mae_mean: float
    mae_std: float
    mse_mean: float
    mse_std: float
    ssim_mean: float
    ssim_std: float
    psnr_mean: float
    psnr_std: float
    n: int


def _check_pair(a: Volume3D, b: Volume3D) -> None:
    if a.dims != b.dims:
        raise DimsMismatch(f"volume dims differ: {a.dims} vs {b.dims}")


def _select(v: Volume3D, mask: RoiMask | None) -> np.ndarray:
    if mask is None:
        return v.values
    mask.check_aligned(v)
    return v.values[mask.flags]


def mae(a: Volume3D, b: Volume3D, mask: RoiMask | None = None) -> float:
    """Mean absolute voxel difference."""
    _check_pair(a, b)
    return float(np.mean(np.abs(_select(a, mask) - _select(b, mask))))


def mse(a: Volume3D, b: Volume3D, mask: RoiMask | None = None) -> float:
    """Mean squared voxel difference."""
    _check_pair(a, b)
    diff = _select(a, mask) - _select(b, mask)
    return float(np.mean(diff * diff))


def psnr(a: Volume3D, b: Volume3D, peak: float = 1.0, mask: RoiMask | None = None) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical volumes.

    Computed as 20*log10(peak) - 10*log10(mse), so psnr(a, b, 1.0) equals
    -10*log10(mse(a, b)) exactly.
    """
    if peak <= 0:
        raise ValueError(f"peak must be positive, got {peak}")
    err = mse(a, b, mask)
    if err == 0.0:
        return math.inf
    return 20.0 * math.log10(peak) - 10.0 * math.log10(err)


def _gaussian_taps(params: SsimParams) -> np.ndarray:
    i = np.arange(-params.window, params.window + 1, dtype=np.float64)
    return np.exp(-(i * i) / (2.0 * params.sigma * params.sigma))


def _windowed_sums(arr: np.ndarray, taps: np.ndarray) -> np.ndarray:
    out = arr
    for axis in range(3):
        out = correlate1d(out, taps, axis=axis, mode="constant", cval=0.0)
    return out


def ssim3d(
    a: Volume3D,
    b: Volume3D,
    params: SsimParams = SsimParams(),
    mask: RoiMask | None = None,
) -> float:
    """Mean 3D Gaussian-weighted structural similarity.

    Each voxel-centered window uses weights renormalized over the in-bounds
    portion; weighted first and second moments feed the standard SSIM form.
    With `mask`, the per-voxel map is averaged over in-mask centers only.
    """
    _check_pair(a, b)
    size = 2 * params.window + 1
    if any(d < size for d in a.dims):
        raise VolumeTooSmall(f"dims {a.dims} smaller than the {size}^3 SSIM window")

    taps = _gaussian_taps(params)
    weight = _windowed_sums(np.ones(a.dims), taps)
    av, bv = a.values, b.values
    mu_a = _windowed_sums(av, taps) / weight
    mu_b = _windowed_sums(bv, taps) / weight
    var_a = _windowed_sums(av * av, taps) / weight - mu_a * mu_a
    var_b = _windowed_sums(bv * bv, taps) / weight - mu_b * mu_b
    cov = _windowed_sums(av * bv, taps) / weight - mu_a * mu_b

    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    ssim_map = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    if mask is not None:
        mask.check_aligned(a)
        return float(np.mean(ssim_map[mask.flags]))
    return float(np.mean(ssim_map))


def compute_metrics(
    original: Volume3D,
    synthetic: Volume3D,
    ssim_params: SsimParams = SsimParams(),
    peak: float = 1.0,
    mask: RoiMask | None = None,
) -> MetricSet:
    return MetricSet(
        mae=mae(original, synthetic, mask),
        mse=mse(original, synthetic, mask),
        ssim=ssim3d(original, synthetic, ssim_params, mask),
        psnr=psnr(original, synthetic, peak, mask),
    )


def summarize(values: list[MetricSet]) -> MetricSummary:
    """Cohort mean and std for each metric."""
    if not values:
        raise EmptyInput("summarize over no metric sets")
    mae_m, mae_s = mean_std(m.mae for m in values)
    mse_m, mse_s = mean_std(m.mse for m in values)
    ssim_m, ssim_s = mean_std(m.ssim for m in values)
    psnr_m, psnr_s = mean_std(m.psnr for m in values)
    return MetricSummary(
        mae_mean=mae_m,
        mae_std=mae_s,
        mse_mean=mse_m,
        mse_std=mse_s,
        ssim_mean=ssim_m,
        ssim_std=ssim_s,
        psnr_mean=psnr_m,
        psnr_std=psnr_s,
        n=len(values),
    )

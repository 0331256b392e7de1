"""Local-intensity and intensity-statistics features on continuous voxel values."""
from __future__ import annotations

import math

import numpy as np
from scipy.signal import fftconvolve

from ..volume import RoiMask, Volume3D

# radius of a 1 cm^3 sphere, in mm
PEAK_SPHERE_RADIUS_MM = (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0) * 10.0


def nearest_rank_percentile(sorted_values: np.ndarray, p: float) -> float:
    """Nearest-rank percentile on an ascending-sorted multiset."""
    n = sorted_values.size
    idx = max(0, math.ceil(p / 100.0 * n) - 1)
    return float(sorted_values[min(idx, n - 1)])


def sphere_mean_map(v: Volume3D) -> np.ndarray:
    """Mean intensity over the 1 cm^3 sphere centered at each voxel.

    The sphere is intersected with the volume; means are taken over the
    voxels whose centers fall within the radius.
    """
    sx, sy, sz = v.spacing
    half = [int(math.floor(PEAK_SPHERE_RADIUS_MM / s)) for s in (sx, sy, sz)]
    ax = [np.arange(-h, h + 1, dtype=np.float64) * s for h, s in zip(half, (sx, sy, sz))]
    dx, dy, dz = np.meshgrid(*ax, indexing="ij")
    kernel = (dx * dx + dy * dy + dz * dz <= PEAK_SPHERE_RADIUS_MM**2).astype(np.float64)

    sums = fftconvolve(v.values, kernel, mode="same")
    counts = fftconvolve(np.ones(v.dims), kernel, mode="same")
    return sums / counts


def local_intensity(v: Volume3D, mask: RoiMask) -> dict[str, float]:
    """local_peak: sphere mean at the brightest ROI voxel (first in flat
    order on ties); global_peak: highest sphere mean over all ROI centers."""
    mask.check_aligned(v)
    mean_map = sphere_mean_map(v)

    roi_vals = np.where(mask.flags, v.values, -np.inf)
    flat = roi_vals.ravel(order="F")
    center_flat = int(np.argmax(flat))
    nx, ny, _ = v.dims
    cx = center_flat % nx
    cy = (center_flat // nx) % ny
    cz = center_flat // (nx * ny)

    local_peak = float(mean_map[cx, cy, cz])
    global_peak = float(mean_map[mask.flags].max())
    return {"local_peak": local_peak, "global_peak": global_peak}


def basic_distribution_stats(values: np.ndarray) -> tuple[dict[str, float], set[str]]:
    """The 16 order/moment statistics shared by the IS and IH families.

    Returns (features, flagged names). Skewness, kurtosis, and the
    coefficient of variation are NaN-flagged when the variance is zero;
    the quartile coefficient of dispersion when p25 + p75 is zero.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    srt = np.sort(x)
    flagged: set[str] = set()

    mean = float(np.mean(x))
    centered = x - mean
    var = float(np.mean(centered**2))
    p10 = nearest_rank_percentile(srt, 10)
    p25 = nearest_rank_percentile(srt, 25)
    p75 = nearest_rank_percentile(srt, 75)
    p90 = nearest_rank_percentile(srt, 90)
    median = float(np.median(srt))

    if var > 0.0:
        skewness = float(np.mean(centered**3)) / var**1.5
        kurtosis = float(np.mean(centered**4)) / var**2 - 3.0
    else:
        skewness = kurtosis = math.nan
        flagged.update(("skewness", "kurtosis"))

    if var > 0.0 and mean != 0.0:
        cov = math.sqrt(var) / mean
    else:
        cov = math.nan
        flagged.add("coefficient_of_variation")

    if p25 + p75 != 0.0:
        qcd = (p75 - p25) / (p75 + p25)
    else:
        qcd = math.nan
        flagged.add("quartile_coefficient_of_dispersion")

    robust = x[(x >= p10) & (x <= p90)]
    features = {
        "mean": mean,
        "variance": var,
        "skewness": skewness,
        "kurtosis": kurtosis,
        "median": median,
        "minimum": float(srt[0]),
        "percentile_10": p10,
        "percentile_90": p90,
        "maximum": float(srt[-1]),
        "interquartile_range": p75 - p25,
        "range": float(srt[-1] - srt[0]),
        "mean_absolute_deviation": float(np.mean(np.abs(centered))),
        "robust_mean_absolute_deviation": float(np.mean(np.abs(robust - np.mean(robust)))),
        "median_absolute_deviation": float(np.mean(np.abs(x - median))),
        "coefficient_of_variation": cov,
        "quartile_coefficient_of_dispersion": qcd,
    }
    assert n > 0
    return features, flagged


def intensity_statistics(v: Volume3D, mask: RoiMask) -> tuple[dict[str, float], set[str]]:
    """The 18 intensity-based statistics over ROI voxel values."""
    mask.check_aligned(v)
    roi = v.values[mask.flags]
    features, flagged = basic_distribution_stats(roi)
    features["energy"] = float(np.sum(roi * roi))
    features["root_mean_square"] = float(np.sqrt(np.mean(roi * roi)))
    return features, flagged

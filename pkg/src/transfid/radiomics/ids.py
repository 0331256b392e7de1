"""Canonical registry of the 186 feature identifiers.

Order is fixed: families in the order below, direction-averaged before
merged-matrix aggregation, names alphabetical within each block. The
registry is asserted at import time to contain exactly 186 entries with
the expected per-family counts.
"""
from __future__ import annotations

from dataclasses import dataclass

FAMILY_ORDER = ("LI", "IS", "IH", "IVH", "GLCM", "GLRLM", "GLSZM", "GLDZM", "NGTDM", "NGLDM")

AGG_NONE = "none"
AGG_DIR_AVG = "dir_avg"
AGG_DIR_MERGED = "dir_merged"

EXPECTED_FAMILY_COUNTS = {
    "LI": 2,
    "IS": 18,
    "IH": 23,
    "IVH": 7,
    "GLCM": 50,
    "GLRLM": 32,
    "GLSZM": 16,
    "GLDZM": 16,
    "NGTDM": 5,
    "NGLDM": 17,
}

LI_NAMES = ("local_peak", "global_peak")

IS_NAMES = (
    "coefficient_of_variation",
    "energy",
    "interquartile_range",
    "kurtosis",
    "maximum",
    "mean",
    "mean_absolute_deviation",
    "median",
    "median_absolute_deviation",
    "minimum",
    "percentile_10",
    "percentile_90",
    "quartile_coefficient_of_dispersion",
    "range",
    "robust_mean_absolute_deviation",
    "root_mean_square",
    "skewness",
    "variance",
)

IH_NAMES = (
    "coefficient_of_variation",
    "entropy",
    "interquartile_range",
    "kurtosis",
    "maximum",
    "maximum_gradient",
    "maximum_gradient_level",
    "mean",
    "mean_absolute_deviation",
    "median",
    "median_absolute_deviation",
    "minimum",
    "minimum_gradient",
    "minimum_gradient_level",
    "mode",
    "percentile_10",
    "percentile_90",
    "quartile_coefficient_of_dispersion",
    "range",
    "robust_mean_absolute_deviation",
    "skewness",
    "uniformity",
    "variance",
)

IVH_NAMES = (
    "area_under_curve",
    "i10",
    "i10_minus_i90",
    "i90",
    "v10",
    "v10_minus_v90",
    "v90",
)

GLCM_NAMES = (
    "angular_second_moment",
    "autocorrelation",
    "cluster_prominence",
    "cluster_shade",
    "cluster_tendency",
    "contrast",
    "correlation",
    "difference_average",
    "difference_entropy",
    "difference_variance",
    "dissimilarity",
    "information_correlation_1",
    "information_correlation_2",
    "inverse_difference",
    "inverse_difference_moment",
    "inverse_difference_moment_normalised",
    "inverse_difference_normalised",
    "inverse_variance",
    "joint_average",
    "joint_entropy",
    "joint_maximum",
    "joint_variance",
    "sum_average",
    "sum_entropy",
    "sum_variance",
)

GLRLM_NAMES = (
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_grey_level_run_emphasis",
    "long_run_emphasis",
    "long_run_high_grey_level_emphasis",
    "long_run_low_grey_level_emphasis",
    "low_grey_level_run_emphasis",
    "run_entropy",
    "run_length_non_uniformity",
    "run_length_non_uniformity_normalised",
    "run_length_variance",
    "run_percentage",
    "short_run_emphasis",
    "short_run_high_grey_level_emphasis",
    "short_run_low_grey_level_emphasis",
)

GLSZM_NAMES = (
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_grey_level_zone_emphasis",
    "large_zone_emphasis",
    "large_zone_high_grey_level_emphasis",
    "large_zone_low_grey_level_emphasis",
    "low_grey_level_zone_emphasis",
    "small_zone_emphasis",
    "small_zone_high_grey_level_emphasis",
    "small_zone_low_grey_level_emphasis",
    "zone_percentage",
    "zone_size_entropy",
    "zone_size_non_uniformity",
    "zone_size_non_uniformity_normalised",
    "zone_size_variance",
)

GLDZM_NAMES = (
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_grey_level_zone_emphasis",
    "large_distance_emphasis",
    "large_distance_high_grey_level_emphasis",
    "large_distance_low_grey_level_emphasis",
    "low_grey_level_zone_emphasis",
    "small_distance_emphasis",
    "small_distance_high_grey_level_emphasis",
    "small_distance_low_grey_level_emphasis",
    "zone_distance_entropy",
    "zone_distance_non_uniformity",
    "zone_distance_non_uniformity_normalised",
    "zone_distance_variance",
    "zone_percentage",
)

NGTDM_NAMES = ("busyness", "coarseness", "complexity", "contrast", "strength")

NGLDM_NAMES = (
    "dependence_count_energy",
    "dependence_count_entropy",
    "dependence_count_non_uniformity",
    "dependence_count_non_uniformity_normalised",
    "dependence_count_percentage",
    "dependence_count_variance",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_dependence_emphasis",
    "high_dependence_high_grey_level_emphasis",
    "high_dependence_low_grey_level_emphasis",
    "high_grey_level_count_emphasis",
    "low_dependence_emphasis",
    "low_dependence_high_grey_level_emphasis",
    "low_dependence_low_grey_level_emphasis",
    "low_grey_level_count_emphasis",
)

_FAMILY_NAMES = {
    "LI": LI_NAMES,
    "IS": IS_NAMES,
    "IH": IH_NAMES,
    "IVH": IVH_NAMES,
    "GLCM": GLCM_NAMES,
    "GLRLM": GLRLM_NAMES,
    "GLSZM": GLSZM_NAMES,
    "GLDZM": GLDZM_NAMES,
    "NGTDM": NGTDM_NAMES,
    "NGLDM": NGLDM_NAMES,
}

_DIRECTIONAL_FAMILIES = ("GLCM", "GLRLM")


@dataclass(frozen=True, order=False)
class FeatureId:
    """One canonical feature identifier (family, aggregation, name)."""

    family: str
    aggregation: str
    name: str

    @property
    def key(self) -> str:
        if self.aggregation == AGG_NONE:
            return f"{self.family.lower()}.{self.name}"
        return f"{self.family.lower()}.{self.aggregation}.{self.name}"

    def __str__(self) -> str:
        return self.key


def _build_registry() -> tuple[FeatureId, ...]:
    ids: list[FeatureId] = []
    for family in FAMILY_ORDER:
        names = sorted(_FAMILY_NAMES[family])
        if family in _DIRECTIONAL_FAMILIES:
            for agg in (AGG_DIR_AVG, AGG_DIR_MERGED):
                ids.extend(FeatureId(family, agg, name) for name in names)
        else:
            ids.extend(FeatureId(family, AGG_NONE, name) for name in names)
    return tuple(ids)


ALL_FEATURE_IDS: tuple[FeatureId, ...] = _build_registry()
ALL_FEATURE_KEYS: tuple[str, ...] = tuple(f.key for f in ALL_FEATURE_IDS)


def family_counts(ids=ALL_FEATURE_IDS) -> dict[str, int]:
    counts = {family: 0 for family in FAMILY_ORDER}
    for fid in ids:
        counts[fid.family] += 1
    return counts


def _check_registry() -> None:
    assert len(ALL_FEATURE_IDS) == 186, f"registry has {len(ALL_FEATURE_IDS)} entries"
    counts = family_counts()
    assert counts == EXPECTED_FAMILY_COUNTS, f"family counts off: {counts}"
    assert len(set(ALL_FEATURE_KEYS)) == 186, "duplicate feature keys"


_check_registry()

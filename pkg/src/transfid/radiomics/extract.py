"""Full 186-feature extraction for one (volume, mask) pair."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..preprocess import DiscretizationScheme, discretize
from ..volume import RoiMask, Volume3D
from .histogram import intensity_histogram_features, ivh_features
from .ids import ALL_FEATURE_IDS, AGG_NONE
from .intensity import intensity_statistics, local_intensity
from .texture import glcm_features, glrlm_features, ngldm_features, ngtdm_features, zone_features
from .vector import FeatureVector


@dataclass(frozen=True)
class ExtractionSettings:
    """Knobs that affect feature values, recorded in vector provenance."""

    scheme: DiscretizationScheme = DiscretizationScheme("FBN", 32)
    ivh_bins: int = 1000
    ngldm_alpha: int = 0
    config_hash: str = ""


def extract_all(
    v: Volume3D, mask: RoiMask, settings: ExtractionSettings = ExtractionSettings()
) -> FeatureVector:
    """Compute all 186 features in canonical order.

    Intensity families (LI, IS, IVH) run on continuous values; the
    histogram and texture families run on the discretized volume. A family
    failure degrades that family to flagged NaNs instead of aborting.
    """
    mask.check_aligned(v)

    results: dict[tuple[str, str], tuple[dict[str, float], set[str]]] = {}

    def run(family: str, aggregation: str, compute) -> None:
        try:
            results[(family, aggregation)] = compute()
        except Exception:
            results[(family, aggregation)] = ({}, set())

    run("LI", AGG_NONE, lambda: (local_intensity(v, mask), set()))
    run("IS", AGG_NONE, lambda: intensity_statistics(v, mask))
    run("IVH", AGG_NONE, lambda: ivh_features(v, mask, settings.ivh_bins))

    d = discretize(v, mask, settings.scheme)
    run("IH", AGG_NONE, lambda: intensity_histogram_features(d))
    glcm = glcm_features(d)
    glrlm = glrlm_features(d)
    for agg in ("dir_avg", "dir_merged"):
        results[("GLCM", agg)] = glcm[agg]
        results[("GLRLM", agg)] = glrlm[agg]
    try:
        szm, dzm = zone_features(d)
    except Exception:
        szm = dzm = ({}, set())
    results[("GLSZM", AGG_NONE)] = szm
    results[("GLDZM", AGG_NONE)] = dzm
    run("NGTDM", AGG_NONE, lambda: ngtdm_features(d))
    run("NGLDM", AGG_NONE, lambda: ngldm_features(d, settings.ngldm_alpha))

    values: dict[str, float] = {}
    flags: set[str] = set()
    for fid in ALL_FEATURE_IDS:
        family_values, family_flags = results[(fid.family, fid.aggregation)]
        if fid.name in family_values:
            values[fid.key] = float(family_values[fid.name])
            if fid.name in family_flags:
                flags.add(fid.key)
        else:
            values[fid.key] = math.nan
            flags.add(fid.key)

    provenance = {
        "scheme": settings.scheme.describe(),
        "effective_levels": str(d.ng),
        "config_hash": settings.config_hash,
    }
    return FeatureVector(values=values, flags=frozenset(flags), provenance=provenance)
